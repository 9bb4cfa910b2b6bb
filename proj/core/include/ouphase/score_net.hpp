#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ouphase/score.hpp"
#include "ouphase/spectrogram.hpp"

namespace ouphase {

/// A small convolutional encoder/decoder score model (float32, single
/// threaded, CPU only). Input is the 4-channel stack (Re x_t, Im x_t, Re y,
/// Im y); output is a 2-channel (Re, Im) field of the same shape predicting
/// the unit-scale noise residual, i.e. the score times sigma(t).
///
/// Topology: two stride-free 3x3 conv + ReLU encoder stages with 2x2 average
/// pooling between (channels 4 -> 16 -> 32), a 3x3 bottleneck conv whose
/// pre-activation receives a per-channel bias projected from a sinusoidal
/// time embedding, then two decoder stages of nearest-neighbor upsampling,
/// skip concatenation, and 3x3 conv + ReLU, closed by a 1x1 projection to 2
/// channels (zero-initialized so an untrained model predicts zero).
///
/// The spatial extent is padded to a multiple of 4 internally and cropped
/// back, so any field size works; gradients ignore the padding region.
class SmallScoreNet {
 public:
  /// He-normal initialization drawn from the given seed; ~30k parameters.
  explicit SmallScoreNet(std::uint64_t init_seed = 0, int time_dim = 64);

  /// Forward pass producing the unit-scale prediction; deterministic.
  ComplexField raw_output(const ComplexField& x_t, const ComplexField& y, double t) const;

  std::size_t parameter_count() const;
  const TimeEmbedding& time_embedding() const { return embedding_; }

  /// Named parameter tensors and their shapes, in serialization order.
  std::vector<std::pair<std::string, std::vector<Eigen::Index>>> tensor_shapes() const;

  /// Column-major flattening of all tensors in tensor_shapes() order.
  std::vector<double> serialize() const;
  /// Inverse of serialize(); the value count must match parameter_count().
  void deserialize(std::span<const double> values);

  /// Accumulated parameter gradients, shaped like the network's tensors.
  struct Gradients {
    Eigen::MatrixXf enc1_w, enc2_w, mid_w, tproj_w, dec2_w, dec1_w, out_w;
    Eigen::VectorXf enc1_b, enc2_b, mid_b, tproj_b, dec2_b, dec1_b, out_b;
  };

  /// A zeroed gradient buffer matching this network.
  Gradients make_gradients() const;

  /// Adam optimizer accumulators (flat, in serialization order) plus the
  /// update counter used for bias correction. Default-constructed state is
  /// a fresh optimizer; the buffers are sized on first use.
  struct AdamState {
    std::vector<double> m, v;
    long step = 0;
  };

  /// Forward + backward for one sample under the denoising score-matching
  /// loss sum|R + z|^2 / sigma_t^2 (R = raw output). Adds parameter gradients
  /// into `grads` and returns the sample's loss. Does not modify the network.
  double accumulate_gradients(const ComplexField& x_t, const ComplexField& y, double t,
                              const ComplexField& z, double sigma_t,
                              Gradients& grads) const;

  /// Plain gradient-descent update: param -= lr * grad.
  void apply_update(const Gradients& grads, double learning_rate);

  /// One Adam update with bias correction: param -= lr * m_hat/(sqrt(v_hat)+eps)
  /// where the moments track grad * grad_scale (use 1/batch for mean
  /// gradients). Moments are kept in double precision; parameters stay float.
  void apply_adam(const Gradients& grads, AdamState& state, double learning_rate,
                  double grad_scale = 1.0, double beta1 = 0.9, double beta2 = 0.999,
                  double epsilon = 1e-8);

 private:
  struct Conv {
    Eigen::MatrixXf w;  // (out_channels, in_channels * kernel_size^2)
    Eigen::VectorXf b;
  };
  struct Cache;

  ComplexField forward(const ComplexField& x_t, const ComplexField& y, double t,
                       Cache* cache) const;

  TimeEmbedding embedding_;
  Conv enc1_, enc2_, mid_, dec2_, dec1_, out_;
  Eigen::MatrixXf tproj_w_;  // (mid channels, embedding dim)
  Eigen::VectorXf tproj_b_;
};

}  // namespace ouphase

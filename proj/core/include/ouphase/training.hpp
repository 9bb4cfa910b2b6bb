#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ouphase/score_net.hpp"
#include "ouphase/sde.hpp"

namespace ouphase {

struct TrainingConfig {
  double learning_rate = 1e-4;
  long steps = 2000;
  int batch_size = 1;
  int slice_frames = 256;
  std::uint64_t seed = 0;
  /// Write a checkpoint every this many steps (0 disables periodic saves; a
  /// final checkpoint is always written when a path is set).
  long checkpoint_every = 0;
  std::filesystem::path checkpoint_path;

  /// learning_rate >= 0 (zero is legal and leaves parameters fixed); the
  /// integer fields must be positive. Throws std::invalid_argument.
  void validate() const;
};

/// One optimization step over an explicit batch of (x0, y) pairs (compressed
/// spectrogram and its zero-phase conditioner, uniform shapes). Per element,
/// in order: draws t ~ U[t_eps, t_max], then the forward perturbation
/// (x_t, z); accumulates the denoising score-matching loss and its gradient;
/// finally applies one Adam update with the mean gradient, advancing the
/// caller-owned optimizer state. (The raw loss weight spans ~1/sigma(t_eps)^2,
/// three orders of magnitude, so plain gradient descent has no workable step
/// size; Adam's per-parameter normalization handles it at the default rate.)
/// Returns the pre-update mean loss. Throws std::runtime_error when the loss
/// is non-finite (divergence).
double train_step(SmallScoreNet& net,
                  const std::vector<std::pair<ComplexField, ComplexField>>& batch,
                  Rng& rng, const OuveParams& params, const TrainingConfig& config,
                  SmallScoreNet::AdamState& optimizer);

struct TrainResult {
  std::vector<double> losses;  ///< pre-update loss per step
  long final_step = 0;         ///< step counter after training (resume-aware)
};

/// Trains on a dataset of compressed complex spectrograms. Each step draws
/// batch_size random items, slices slice_frames consecutive frames at a
/// random offset (zero-padding items shorter than slice_frames), builds the
/// zero-phase conditioner y = |x0|, and delegates to train_step. Checkpoints
/// per TrainingConfig; `start_step` offsets the counter when resuming.
TrainResult train(SmallScoreNet& net, const std::vector<ComplexField>& dataset,
                  const TrainingConfig& config, const OuveParams& params,
                  long start_step = 0,
                  const std::map<std::string, std::string>& config_echo = {});

/// Writes the network as a spectrogram-container file (parameters as a 1xP
/// complex row, imaginary parts zero) plus a `<path>.manifest` text sidecar
/// recording the step counter, tensor shapes, and a config echo.
void save_checkpoint(const std::filesystem::path& path, const SmallScoreNet& net,
                     long step, const std::map<std::string, std::string>& config_echo);

struct Checkpoint {
  SmallScoreNet net;
  long step = 0;
  std::map<std::string, std::string> config_echo;
};

/// Loads a checkpoint written by save_checkpoint. Throws std::runtime_error
/// on missing/corrupt files and shape or parameter-count mismatches.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace ouphase

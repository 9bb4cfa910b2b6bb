#pragma once

#include <Eigen/Dense>
#include <memory>

#include "ouphase/sde.hpp"
#include "ouphase/spectrogram.hpp"

namespace ouphase {

/// Sinusoidal time features: dim/2 fixed log-spaced frequencies, concatenated
/// as [sin(f_i t)..., cos(f_i t)...]. The squared norm is dim/2 for every t.
struct TimeEmbedding {
  Eigen::ArrayXd frequencies;  // dim/2 entries, strictly positive

  int dim() const { return static_cast<int>(2 * frequencies.size()); }

  /// Frequencies log-spaced over [f_min, f_max]; dim must be even and >= 2.
  static TimeEmbedding log_spaced(int dim = 64, double f_min = 1.0, double f_max = 1000.0);
};

Eigen::ArrayXd embed_time(double t, const TimeEmbedding& embedding);

/// Denoising score-matching loss for one sample: sum over bins of
/// |s_pred + z / sigma_t|^2. Minimized (exactly zero) at s_pred = -z/sigma_t.
double dsm_loss(const ComplexField& s_pred, const ComplexField& z, double sigma_t);

/// A score model s(x_t, y, t) for the reverse SDE. Implementations must be
/// deterministic functions of their inputs.
class ScoreEstimator {
 public:
  virtual ~ScoreEstimator() = default;
  virtual ComplexField evaluate(const ComplexField& x_t, const ComplexField& y,
                                double t) const = 0;
};

/// Oracle score for a point-mass data distribution at a known x0:
/// -(x_t - mean(x0, y, t)) / variance(t).
class AnalyticScore final : public ScoreEstimator {
 public:
  AnalyticScore(ComplexField x0, OuveParams params);

  ComplexField evaluate(const ComplexField& x_t, const ComplexField& y,
                        double t) const override;

 private:
  ComplexField x0_;
  OuveParams params_;
};

class SmallScoreNet;

/// Adapts a trained network to the estimator interface. The network predicts
/// the unit-scale residual; the score is that output divided by sigma(t).
class NetScore final : public ScoreEstimator {
 public:
  NetScore(std::shared_ptr<const SmallScoreNet> net, OuveParams params);

  ComplexField evaluate(const ComplexField& x_t, const ComplexField& y,
                        double t) const override;

 private:
  std::shared_ptr<const SmallScoreNet> net_;
  OuveParams params_;
};

}  // namespace ouphase

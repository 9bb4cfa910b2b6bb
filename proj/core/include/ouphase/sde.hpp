#pragma once

#include <cstdint>
#include <random>

#include "ouphase/spectrogram.hpp"

namespace ouphase {

/// Deterministic 64-bit generator used everywhere randomness is needed.
/// Draw order is part of each function's contract so that seeded runs are
/// reproducible bit for bit.
using Rng = std::mt19937_64;

/// Parameters of the mean-reverting forward SDE with exponentially exploding
/// noise: dx = gamma*(y - x) dt + g(t) dw, where
///   g(t) = sigma_min * (sigma_max/sigma_min)^t * sqrt(2 ln(sigma_max/sigma_min)).
/// The process interpolates from the target x0 at t=0 toward the corrupted
/// state y, accumulating noise of scale sigma(t).
struct OuveParams {
  double sigma_min = 0.05;
  double sigma_max = 0.5;
  double gamma = 1.5;
  double t_max = 1.0;
  double t_eps = 0.03;

  double log_ratio() const;  ///< ln(sigma_max / sigma_min)

  /// Throws std::invalid_argument unless 0 < sigma_min < sigma_max,
  /// gamma > 0, 0 < t_eps < t_max, and gamma + log_ratio() > 0 (the variance
  /// expression divides by that sum).
  void validate() const;
};

/// Drift gamma*(y - x). Shapes of x and y must match.
ComplexField drift(const ComplexField& x, const ComplexField& y, const OuveParams& params);

/// Diffusion coefficient g(t); requires 0 <= t <= t_max (small slack for
/// floating-point grids).
double diffusion(double t, const OuveParams& params);

/// Closed-form perturbation mean: exp(-gamma t) x0 + (1 - exp(-gamma t)) y.
ComplexField mean(const ComplexField& x0, const ComplexField& y, double t,
                  const OuveParams& params);

/// Closed-form perturbation variance sigma(t)^2 (per complex entry,
/// E|x_t - mean|^2). Exactly zero at t = 0; strictly increasing on [0, t_max].
double variance(double t, const OuveParams& params);

/// sqrt(variance(t)).
double std_dev(double t, const OuveParams& params);

/// Circularly symmetric unit complex Gaussian field: each entry has
/// independent real and imaginary parts of variance 1/2 (E|z|^2 = 1).
/// Entries are drawn column-major, real part before imaginary part.
ComplexField sample_complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// A draw x_t = mean(x0,y,t) + sigma(t) * z together with the unit noise z
/// that produced it (the regression target for score training).
struct ForwardSample {
  ComplexField x_t;
  ComplexField z;
};

ForwardSample sample_forward(const ComplexField& x0, const ComplexField& y, double t,
                             const OuveParams& params, Rng& rng);

/// Terminal draw x_T = y + sigma(t_max) * z, the reverse-process start state.
ComplexField sample_terminal(const ComplexField& y, const OuveParams& params, Rng& rng);

/// Score of the Gaussian perturbation kernel centered on a known x0:
/// -(x_t - mean(x0,y,t)) / variance(t). Requires t in [t_eps, t_max].
ComplexField analytic_score(const ComplexField& x_t, const ComplexField& x0,
                            const ComplexField& y, double t, const OuveParams& params);

}  // namespace ouphase

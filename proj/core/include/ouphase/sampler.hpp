#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ouphase/score.hpp"
#include "ouphase/sde.hpp"
#include "ouphase/spectrogram.hpp"
#include "ouphase/stft.hpp"
#include "ouphase/transforms.hpp"
#include "ouphase/wave.hpp"

namespace ouphase {

struct SamplerConfig {
  int n_steps = 30;
  std::uint64_t seed = 0;
  bool enforce_magnitude = true;

  /// Requires n_steps >= 1 (throws std::invalid_argument).
  void validate() const;
};

/// One Euler-Maruyama step of the reverse SDE, from time t to t - dt:
///   x <- x + [-f(x,y,t) + g(t)^2 s(x,y,t)] dt + g(t) sqrt(dt) z
/// with drift f, diffusion g, score estimate s, and a fresh unit complex
/// Gaussian z. Throws if the step would cross below t_eps or the score
/// returns non-finite values.
ComplexField reverse_step(const ComplexField& x, const ComplexField& y, double t,
                          double dt, const ScoreEstimator& score, Rng& rng,
                          const OuveParams& params);

struct ReverseDiagnostics {
  std::vector<double> t_grid;  ///< N+1 times from t_max down to t_eps
  double wall_time_s = 0.0;
};

/// Integrates the reverse SDE from x_T = sample_terminal(y) down to t_eps in
/// n_steps uniform steps; returns the final state. Non-finite states abort
/// with the offending step index in the message.
ComplexField solve_reverse(const ComplexField& y, const ScoreEstimator& score,
                           const SamplerConfig& config, const OuveParams& params,
                           ReverseDiagnostics* diagnostics = nullptr);

struct RetrievalResult {
  ComplexSpectrogram spectrogram;  ///< estimated complex spectrogram
  Waveform waveform;               ///< synthesized estimate, target_len samples
  ReverseDiagnostics diagnostics;  ///< grid of the reverse solve + total wall time
};

/// End-to-end phase retrieval from a magnitude spectrogram A (entrywise >= 0):
/// compress the zero-phase field A as conditioner, solve the reverse SDE,
/// decompress, optionally re-impose A (config.enforce_magnitude), synthesize.
RetrievalResult retrieve_phase(const RealField& magnitude, const ScoreEstimator& score,
                               const SamplerConfig& sampler_config,
                               const OuveParams& params,
                               const CompressionParams& compression,
                               const StftEngine& engine, Eigen::Index target_len);

struct ScalarSimResult {
  Eigen::ArrayXd t_grid;    ///< N+1 times from t_max down to t_eps
  Eigen::ArrayXXd states;   ///< (n_trajectories, N+1), column j = ensemble at t_grid[j]
};

/// Real-valued 1-D analog of the reverse process, for visualization and
/// distribution checks: each trajectory starts from its own draw
/// x_T ~ N(y, sigma(t_max)^2) and integrates the reverse SDE with the
/// analytic point-mass score toward x0. Noise is real unit Gaussian.
ScalarSimResult simulate_scalar_reverse(double x0, double y, int n_trajectories,
                                        int n_steps, std::uint64_t seed,
                                        const OuveParams& params);

}  // namespace ouphase

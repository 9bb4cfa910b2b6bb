#include "ouphase/sampler.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ouphase {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

void SamplerConfig::validate() const {
  if (n_steps < 1) {
    throw std::invalid_argument("sampler: N must be >= 1");
  }
}

ComplexField reverse_step(const ComplexField& x, const ComplexField& y, double t,
                          double dt, const ScoreEstimator& score, Rng& rng,
                          const OuveParams& params) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw std::invalid_argument("reverse_step: shape mismatch");
  }
  if (!(dt > 0.0)) {
    throw std::invalid_argument("reverse_step: dt must be positive");
  }
  if (t - dt < params.t_eps - 1e-12) {
    throw std::invalid_argument("reverse_step: step from t=" + std::to_string(t) +
                                " would cross below t_eps");
  }

  const ComplexField s = score.evaluate(x, y, t);
  if (!s.isFinite().all()) {
    throw std::runtime_error("reverse_step: score estimate is not finite");
  }
  const double g = diffusion(t, params);
  const ComplexField z = sample_complex_gaussian(x.rows(), x.cols(), rng);
  // Reverse-time Euler-Maruyama: drift -f + g^2 * score, diffusion g.
  return x + (-drift(x, y, params) + g * g * s) * dt + g * std::sqrt(dt) * z;
}

ComplexField solve_reverse(const ComplexField& y, const ScoreEstimator& score,
                           const SamplerConfig& config, const OuveParams& params,
                           ReverseDiagnostics* diagnostics) {
  config.validate();
  params.validate();
  if (!y.isFinite().all()) {
    throw std::invalid_argument("solve_reverse: conditioner y must be finite");
  }

  const auto start = Clock::now();
  const int n = config.n_steps;
  const double dt = (params.t_max - params.t_eps) / n;

  // Uniform grid from t_max down to t_eps; endpoints pinned exactly so the
  // grid is a contract, not a rounding accident.
  std::vector<double> grid(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    grid[static_cast<std::size_t>(i)] = params.t_max - i * dt;
  }
  grid.front() = params.t_max;
  grid.back() = params.t_eps;

  Rng rng(config.seed);
  ComplexField x = sample_terminal(y, params, rng);
  for (int i = 0; i < n; ++i) {
    x = reverse_step(x, y, grid[static_cast<std::size_t>(i)], dt, score, rng, params);
    if (!x.isFinite().all()) {
      throw std::runtime_error("solve_reverse: non-finite state after step " +
                               std::to_string(i + 1) + " of " + std::to_string(n));
    }
  }

  if (diagnostics) {
    diagnostics->t_grid = std::move(grid);
    diagnostics->wall_time_s = seconds_since(start);
  }
  return x;
}

RetrievalResult retrieve_phase(const RealField& magnitude, const ScoreEstimator& score,
                               const SamplerConfig& sampler_config,
                               const OuveParams& params,
                               const CompressionParams& compression,
                               const StftEngine& engine, Eigen::Index target_len) {
  if (!(magnitude >= 0.0).all()) {
    throw std::invalid_argument("retrieve_phase: magnitudes must be non-negative");
  }
  const auto start = Clock::now();

  // Zero-phase conditioner in the compressed domain.
  const ComplexField y =
      compress(magnitude.cast<std::complex<double>>().eval(), compression);

  RetrievalResult result;
  ComplexField x0_compressed =
      solve_reverse(y, score, sampler_config, params, &result.diagnostics);

  ComplexSpectrogram estimate;
  estimate.values = decompress(x0_compressed, compression);
  estimate.config_fingerprint = engine.config().fingerprint();
  if (sampler_config.enforce_magnitude) {
    estimate = magnitude_project(estimate, magnitude);
  }

  result.waveform = engine.istft(estimate, target_len);
  result.spectrogram = std::move(estimate);
  result.diagnostics.wall_time_s = seconds_since(start);
  return result;
}

ScalarSimResult simulate_scalar_reverse(double x0, double y, int n_trajectories,
                                        int n_steps, std::uint64_t seed,
                                        const OuveParams& params) {
  params.validate();
  if (n_trajectories < 1 || n_steps < 1) {
    throw std::invalid_argument("simulate_scalar_reverse: trajectories and steps must be >= 1");
  }

  const double dt = (params.t_max - params.t_eps) / n_steps;
  ScalarSimResult result;
  result.t_grid.resize(n_steps + 1);
  for (int i = 0; i <= n_steps; ++i) {
    result.t_grid[i] = params.t_max - i * dt;
  }
  result.t_grid[0] = params.t_max;
  result.t_grid[n_steps] = params.t_eps;

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  result.states.resize(n_trajectories, n_steps + 1);

  for (int traj = 0; traj < n_trajectories; ++traj) {
    double x = y + std_dev(params.t_max, params) * normal(rng);
    result.states(traj, 0) = x;
    for (int i = 0; i < n_steps; ++i) {
      const double t = result.t_grid[i];
      const double g = diffusion(t, params);
      const double decay = std::exp(-params.gamma * t);
      const double mu = decay * x0 + (1.0 - decay) * y;
      const double s = -(x - mu) / variance(t, params);
      x += (params.gamma * (x - y) + g * g * s) * dt + g * std::sqrt(dt) * normal(rng);
      result.states(traj, i + 1) = x;
    }
  }
  return result;
}

}  // namespace ouphase

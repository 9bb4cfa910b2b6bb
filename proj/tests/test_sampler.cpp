#include <cmath>
#include <complex>

#include "doctest.h"
#include "ouphase/metrics.hpp"
#include "ouphase/sampler.hpp"
#include "ouphase/synth.hpp"
#include "test_util.hpp"

using ouphase::AnalyticScore;
using ouphase::ComplexField;
using ouphase::OuveParams;
using ouphase::Rng;
using ouphase::SamplerConfig;

namespace {

/// Score stub returning a constant field, for exact update-rule checks.
class ConstantScore final : public ouphase::ScoreEstimator {
 public:
  explicit ConstantScore(ComplexField value) : value_(std::move(value)) {}
  ComplexField evaluate(const ComplexField&, const ComplexField&, double) const override {
    return value_;
  }

 private:
  ComplexField value_;
};

class NanScore final : public ouphase::ScoreEstimator {
 public:
  ComplexField evaluate(const ComplexField& x, const ComplexField&, double) const override {
    ComplexField out = x;
    out(0, 0) = std::complex<double>(std::nan(""), 0.0);
    return out;
  }
};

}  // namespace

TEST_CASE("sampler config validation") {
  SamplerConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.n_steps = 0;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("N must be >= 1"),
                       std::invalid_argument);
  cfg.n_steps = -3;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("reverse_step applies the Euler-Maruyama update exactly") {
  const OuveParams params;
  const ComplexField x = testutil::random_field(6, 5, 90);
  const ComplexField y = testutil::random_field(6, 5, 91);
  const ComplexField s = testutil::random_field(6, 5, 92) * 0.3;
  const double t = 0.8, dt = 0.05;

  Rng rng(17);
  const ComplexField stepped =
      ouphase::reverse_step(x, y, t, dt, ConstantScore(s), rng, params);

  // Replicate the contract by hand with the same RNG stream.
  Rng rng_copy(17);
  const ComplexField z = ouphase::sample_complex_gaussian(6, 5, rng_copy);
  const double g = ouphase::diffusion(t, params);
  const ComplexField expected =
      x + (-params.gamma * (y - x) + g * g * s) * dt + g * std::sqrt(dt) * z;

  CHECK((stepped - expected).abs().maxCoeff() <= 1e-14);
}

TEST_CASE("reverse_step refuses to cross below t_eps") {
  const OuveParams params;  // t_eps = 0.03
  const ComplexField x = testutil::random_field(2, 2, 93);
  Rng rng(18);
  CHECK_THROWS_AS(
      ouphase::reverse_step(x, x, 0.05, 0.05, ConstantScore(x), rng, params),
      std::invalid_argument);
  CHECK_THROWS_AS(ouphase::reverse_step(x, x, 0.5, -0.1, ConstantScore(x), rng, params),
                  std::invalid_argument);
  CHECK_NOTHROW(ouphase::reverse_step(x, x, 0.08, 0.05, ConstantScore(x), rng, params));
}

TEST_CASE("reverse_step rejects non-finite scores") {
  const OuveParams params;
  const ComplexField x = testutil::random_field(2, 2, 94);
  Rng rng(19);
  CHECK_THROWS_AS(ouphase::reverse_step(x, x, 0.5, 0.01, NanScore{}, rng, params),
                  std::runtime_error);
}

TEST_CASE("solve_reverse pins the time grid endpoints") {
  const OuveParams params;
  const ComplexField y = testutil::random_field(4, 4, 95);
  const AnalyticScore score(testutil::random_field(4, 4, 96), params);

  SamplerConfig cfg;
  cfg.n_steps = 17;
  cfg.seed = 3;
  ouphase::ReverseDiagnostics diag;
  ouphase::solve_reverse(y, score, cfg, params, &diag);

  REQUIRE(diag.t_grid.size() == 18);
  CHECK(diag.t_grid.front() == params.t_max);
  CHECK(diag.t_grid.back() == params.t_eps);
  const double dt = (params.t_max - params.t_eps) / 17.0;
  for (std::size_t i = 1; i < diag.t_grid.size(); ++i) {
    CHECK(std::abs((diag.t_grid[i - 1] - diag.t_grid[i]) - dt) <= 1e-12);
  }
  CHECK(diag.wall_time_s >= 0.0);
}

TEST_CASE("solve_reverse is reproducible per seed") {
  const OuveParams params;
  const ComplexField x0 = testutil::random_field(8, 8, 97);
  const ComplexField y = testutil::random_field(8, 8, 98);
  const AnalyticScore score(x0, params);

  SamplerConfig cfg;
  cfg.n_steps = 25;
  cfg.seed = 55;
  const ComplexField a = ouphase::solve_reverse(y, score, cfg, params);
  const ComplexField b = ouphase::solve_reverse(y, score, cfg, params);
  CHECK((a == b).all());

  cfg.seed = 56;
  const ComplexField c = ouphase::solve_reverse(y, score, cfg, params);
  CHECK((a != c).any());
}

TEST_CASE("oracle reverse diffusion contracts toward the target") {
  // Start near the conditioner (x0 close to y) so the oracle pulls the
  // terminal cloud onto x0 within the discretization tolerance.
  const OuveParams params;
  ComplexField x0 = ComplexField::Constant(16, 16, std::complex<double>(0.02, 0.0));
  ComplexField y = ComplexField::Zero(16, 16);
  const AnalyticScore score(x0, params);

  SamplerConfig cfg;
  cfg.n_steps = 200;
  cfg.seed = 77;
  const ComplexField estimate = ouphase::solve_reverse(y, score, cfg, params);

  const double err = std::sqrt((estimate - x0).abs2().mean());
  // sigma(t_eps) ~ 0.0188 is the per-entry noise floor at the stop time.
  CHECK(err <= 0.05);
}

TEST_CASE("retrieve_phase enforces the magnitude and target length") {
  ouphase::StftEngine engine{ouphase::StftConfig{}};
  Rng rng(100);
  const ouphase::Waveform mix = ouphase::make_sinusoid_mixture(0.3, 16000, 5, rng);
  const auto spec = engine.stft(mix);
  const ouphase::RealField magnitude = spec.values.abs();

  const ouphase::CompressionParams comp;
  const OuveParams params;
  const AnalyticScore oracle(ouphase::compress(spec.values, comp), params);

  SamplerConfig cfg;
  cfg.n_steps = 40;
  cfg.seed = 7;
  const auto result = ouphase::retrieve_phase(magnitude, oracle, cfg, params, comp,
                                              engine, mix.samples.size());

  REQUIRE(result.waveform.samples.size() == mix.samples.size());
  CHECK(result.waveform.sample_rate == 16000);
  CHECK(result.diagnostics.t_grid.size() == 41);
  CHECK(result.diagnostics.wall_time_s > 0.0);

  // enforce_magnitude: |S| equals the input magnitude entry for entry.
  const ouphase::RealField out_mag = result.spectrogram.values.abs();
  for (Eigen::Index i = 0; i < out_mag.size(); ++i) {
    CHECK(std::abs(out_mag(i) - magnitude(i)) <=
          1e-13 * std::max(1.0, magnitude(i)));
  }
  CHECK(result.spectrogram.config_fingerprint == engine.config().fingerprint());
}

TEST_CASE("retrieve_phase with the oracle reconstructs a tone") {
  ouphase::StftEngine engine{ouphase::StftConfig{}};
  const ouphase::Waveform tone = ouphase::make_tone(1000.0, 0.5, 16000);
  const auto spec = engine.stft(tone);

  const ouphase::CompressionParams comp;
  const OuveParams params;
  const AnalyticScore oracle(ouphase::compress(spec.values, comp), params);

  SamplerConfig cfg;
  cfg.n_steps = 300;
  cfg.seed = 11;
  const auto result = ouphase::retrieve_phase(spec.values.abs(), oracle, cfg, params,
                                              comp, engine, tone.samples.size());

  CHECK(ouphase::si_snr(tone, result.waveform) >= 20.0);
}

TEST_CASE("retrieve_phase of a zero magnitude returns silence") {
  ouphase::StftEngine engine{ouphase::StftConfig{}};
  const ouphase::RealField magnitude = ouphase::RealField::Zero(256, 10);
  const OuveParams params;
  const ouphase::CompressionParams comp;
  const AnalyticScore oracle(ComplexField::Zero(256, 10), params);

  SamplerConfig cfg;
  cfg.n_steps = 10;
  cfg.seed = 1;
  const auto result =
      ouphase::retrieve_phase(magnitude, oracle, cfg, params, comp, engine, 1000);
  for (double s : result.waveform.samples) CHECK(s == 0.0);
}

TEST_CASE("retrieve_phase rejects negative magnitudes") {
  ouphase::StftEngine engine{ouphase::StftConfig{}};
  ouphase::RealField magnitude = ouphase::RealField::Zero(256, 4);
  magnitude(3, 2) = -1e-9;
  const OuveParams params;
  const ouphase::CompressionParams comp;
  const AnalyticScore oracle(ComplexField::Zero(256, 4), params);
  SamplerConfig cfg;
  CHECK_THROWS_AS(
      ouphase::retrieve_phase(magnitude, oracle, cfg, params, comp, engine, 100),
      std::invalid_argument);
}

TEST_CASE("scalar simulation tracks the closed-form mean") {
  const OuveParams params;
  const int n_traj = 400, n_steps = 60;
  const auto sim =
      ouphase::simulate_scalar_reverse(0.02, 0.0, n_traj, n_steps, 99, params);

  REQUIRE(sim.t_grid.size() == n_steps + 1);
  REQUIRE(sim.states.rows() == n_traj);
  REQUIRE(sim.states.cols() == n_steps + 1);
  CHECK(sim.t_grid[0] == params.t_max);
  CHECK(sim.t_grid[n_steps] == params.t_eps);

  // Terminal ensemble: mean within 3 standard errors of x0, spread below
  // twice the stop-time sigma.
  const Eigen::ArrayXd terminal = sim.states.col(n_steps);
  const double mean = terminal.mean();
  const double sd = std::sqrt((terminal - mean).square().mean());
  const double se = sd / std::sqrt(static_cast<double>(n_traj));
  const double target_mean =
      0.02 * std::exp(-params.gamma * params.t_eps);  // toward y = 0
  CHECK(std::abs(mean - target_mean) <= 3.0 * se + 1e-4);
  CHECK(sd <= 2.0 * ouphase::std_dev(params.t_eps, params));
}

TEST_CASE("scalar simulation validates its arguments") {
  const OuveParams params;
  CHECK_THROWS_AS(ouphase::simulate_scalar_reverse(0.0, 0.0, 0, 10, 1, params),
                  std::invalid_argument);
  CHECK_THROWS_AS(ouphase::simulate_scalar_reverse(0.0, 0.0, 10, 0, 1, params),
                  std::invalid_argument);
}

// Microbenchmarks for the hot paths: the two transforms, one reverse-SDE
// step with each score, a single alternating-projection pass, and the
// magnitude compression. All operate on a 1-second signal (256 bins x 126
// frames at the default analysis settings).

#include <benchmark/benchmark.h>

#include "ouphase/griffin_lim.hpp"
#include "ouphase/sampler.hpp"
#include "ouphase/score.hpp"
#include "ouphase/score_net.hpp"
#include "ouphase/sde.hpp"
#include "ouphase/stft.hpp"
#include "ouphase/synth.hpp"
#include "ouphase/transforms.hpp"

namespace {

using namespace ouphase;

struct Fixture {
  StftEngine engine{StftConfig{}};
  Waveform wave;
  ComplexSpectrogram spec;
  RealField magnitude;
  ComplexField x0;  // compressed clean field
  ComplexField y;   // compressed zero-phase conditioner
  ComplexField x;   // a mid-trajectory state
  OuveParams params;

  Fixture() {
    Rng rng(42);
    wave = make_sinusoid_mixture(1.0, StftConfig{}.sample_rate, 6, rng);
    spec = engine.stft(wave);
    magnitude = spec.values.abs();
    CompressionParams comp;
    x0 = compress(spec.values, comp);
    y = compress(magnitude.cast<std::complex<double>>(), comp);
    x = sample_forward(x0, y, 0.5, params, rng).x_t;
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

void BM_Stft(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.engine.stft(f.wave));
  }
}
BENCHMARK(BM_Stft);

void BM_Istft(benchmark::State& state) {
  Fixture& f = fixture();
  const auto len = static_cast<Eigen::Index>(f.wave.samples.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.engine.istft(f.spec, len));
  }
}
BENCHMARK(BM_Istft);

void BM_Compress(benchmark::State& state) {
  Fixture& f = fixture();
  const CompressionParams comp;
  for (auto _ : state) {
    benchmark::DoNotOptimize(compress(f.spec.values, comp));
  }
}
BENCHMARK(BM_Compress);

void BM_ReverseStepAnalytic(benchmark::State& state) {
  Fixture& f = fixture();
  const AnalyticScore score(f.x0, f.params);
  Rng rng(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        reverse_step(f.x, f.y, 0.5, 1e-3, score, rng, f.params));
  }
}
BENCHMARK(BM_ReverseStepAnalytic);

void BM_NetRawOutput(benchmark::State& state) {
  Fixture& f = fixture();
  const SmallScoreNet net(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.raw_output(f.x, f.y, 0.5));
  }
}
BENCHMARK(BM_NetRawOutput);

void BM_GlaSingleIteration(benchmark::State& state) {
  Fixture& f = fixture();
  GlaConfig config;
  config.iterations = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gla(f.magnitude, config, f.engine));
  }
}
BENCHMARK(BM_GlaSingleIteration);

}  // namespace

BENCHMARK_MAIN();

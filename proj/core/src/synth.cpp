#include "ouphase/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ouphase {

Waveform make_sinusoid_mixture(double seconds, int sample_rate, int components,
                               Rng& rng, double peak, double f_lo, double f_hi) {
  if (!(seconds > 0.0) || sample_rate < 1 || components < 1) {
    throw std::invalid_argument("synth: seconds, sample rate, and components must be positive");
  }
  if (!(f_lo > 0.0) || !(f_hi > f_lo) || f_hi >= sample_rate / 2.0) {
    throw std::invalid_argument("synth: frequency band must satisfy 0 < f_lo < f_hi < Nyquist");
  }

  const auto n = static_cast<std::size_t>(std::llround(seconds * sample_rate));
  std::uniform_real_distribution<double> log_f(std::log(f_lo), std::log(f_hi));
  std::uniform_real_distribution<double> amp(0.2, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  Waveform wave;
  wave.sample_rate = sample_rate;
  wave.samples.assign(n, 0.0);
  for (int c = 0; c < components; ++c) {
    const double f = std::exp(log_f(rng));
    const double a = amp(rng);
    const double p = phase(rng);
    const double w = 2.0 * std::numbers::pi * f / sample_rate;
    for (std::size_t i = 0; i < n; ++i) {
      wave.samples[i] += a * std::sin(w * static_cast<double>(i) + p);
    }
  }

  double max_abs = 0.0;
  for (double s : wave.samples) max_abs = std::max(max_abs, std::abs(s));
  if (max_abs > 0.0) {
    const double scale = peak / max_abs;
    for (double& s : wave.samples) s *= scale;
  }
  return wave;
}

Waveform make_tone(double frequency_hz, double seconds, int sample_rate,
                   double amplitude, double phase) {
  if (!(seconds > 0.0) || sample_rate < 1) {
    throw std::invalid_argument("synth: seconds and sample rate must be positive");
  }
  const auto n = static_cast<std::size_t>(std::llround(seconds * sample_rate));
  const double w = 2.0 * std::numbers::pi * frequency_hz / sample_rate;
  Waveform wave;
  wave.sample_rate = sample_rate;
  wave.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    wave.samples[i] = amplitude * std::sin(w * static_cast<double>(i) + phase);
  }
  return wave;
}

}  // namespace ouphase

#pragma once

#include "ouphase/sde.hpp"
#include "ouphase/wave.hpp"

namespace ouphase {

/// A random mixture of sinusoids (frequencies log-uniform in [f_lo, f_hi],
/// random amplitudes and phases), peak-normalized to `peak`. Deterministic
/// given the RNG state; used for synthetic corpora and tests.
Waveform make_sinusoid_mixture(double seconds, int sample_rate, int components,
                               Rng& rng, double peak = 0.7, double f_lo = 100.0,
                               double f_hi = 4000.0);

/// A single sinusoid at the given frequency and amplitude.
Waveform make_tone(double frequency_hz, double seconds, int sample_rate,
                   double amplitude = 0.5, double phase = 0.0);

}  // namespace ouphase

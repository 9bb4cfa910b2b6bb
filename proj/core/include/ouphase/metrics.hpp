#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ouphase/spectrogram.hpp"
#include "ouphase/stft.hpp"
#include "ouphase/wave.hpp"

namespace ouphase {

/// SI-SNR values are capped here so perfect reconstruction stays finite.
inline constexpr double kSiSnrCapDb = 100.0;

struct EvalReport {
  double spectral_convergence = 0.0;
  double consistency_residual = 0.0;
  double si_snr_db = 0.0;
  double wall_time_s = 0.0;
  double rtf = 0.0;  ///< wall time / audio duration
};

/// ||A_ref - |S_est|||_F / ||A_ref||_F. Zero reference norm is an error.
double spectral_convergence(const RealField& reference_magnitude,
                            const ComplexField& estimate);

/// ||S - consistency_project(S)||_F / ||S||_F; zero-norm input returns 0.
double consistency_residual(const ComplexSpectrogram& spec, const StftEngine& engine);

/// Scale- and sign-invariant SNR in dB, capped at kSiSnrCapDb: the estimate
/// is projected onto the reference and the energy ratio of projection to
/// residual is reported. Lengths must match; zero-energy inputs are errors.
double si_snr(const Waveform& reference, const Waveform& estimate);

struct BenchmarkRow {
  double length_s = 0.0;
  double mean_time_s = 0.0;
  double rtf = 0.0;
};

/// Times `runner` (a retrieval procedure taking the input length in seconds)
/// for each length, `repetitions` times each, sequentially. Failures inside
/// the runner are rethrown with the offending length in the message.
std::vector<BenchmarkRow> benchmark(const std::function<void(double)>& runner,
                                    std::span<const double> lengths_s, int repetitions);

/// CSV with the fixed header "length_s,mean_time_s,rtf" plus any extra metric
/// columns appended by name.
void write_benchmark_csv(const std::filesystem::path& path,
                         std::span<const BenchmarkRow> rows,
                         std::span<const std::string> extra_names = {},
                         std::span<const std::vector<double>> extra_columns = {});

}  // namespace ouphase

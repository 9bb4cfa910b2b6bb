#include "ouphase/metrics.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace ouphase {

double spectral_convergence(const RealField& reference_magnitude,
                            const ComplexField& estimate) {
  if (reference_magnitude.rows() != estimate.rows() ||
      reference_magnitude.cols() != estimate.cols()) {
    throw std::invalid_argument("spectral_convergence: shape mismatch");
  }
  const double ref_norm = reference_magnitude.matrix().norm();
  if (ref_norm == 0.0) {
    throw std::invalid_argument("spectral_convergence: zero reference norm");
  }
  return (reference_magnitude - estimate.abs()).matrix().norm() / ref_norm;
}

double consistency_residual(const ComplexSpectrogram& spec, const StftEngine& engine) {
  const double norm = spec.values.matrix().norm();
  if (norm == 0.0) {
    return 0.0;  // zero spectrogram is trivially consistent
  }
  const ComplexSpectrogram projected = engine.consistency_project(spec);
  return (spec.values - projected.values).matrix().norm() / norm;
}

double si_snr(const Waveform& reference, const Waveform& estimate) {
  if (reference.samples.size() != estimate.samples.size()) {
    throw std::invalid_argument("si_snr: length mismatch");
  }
  if (reference.samples.empty()) {
    throw std::invalid_argument("si_snr: empty signals");
  }

  double ref_energy = 0.0, est_energy = 0.0, dot = 0.0;
  for (std::size_t i = 0; i < reference.samples.size(); ++i) {
    ref_energy += reference.samples[i] * reference.samples[i];
    est_energy += estimate.samples[i] * estimate.samples[i];
    dot += reference.samples[i] * estimate.samples[i];
  }
  if (ref_energy == 0.0 || est_energy == 0.0) {
    throw std::invalid_argument("si_snr: zero-energy reference or estimate");
  }

  // Optimal scaling absorbs gain and sign: target = (<e,r>/<r,r>) r.
  const double scale = dot / ref_energy;
  const double target_energy = scale * scale * ref_energy;
  double residual_energy = 0.0;
  for (std::size_t i = 0; i < reference.samples.size(); ++i) {
    const double r = estimate.samples[i] - scale * reference.samples[i];
    residual_energy += r * r;
  }
  if (residual_energy <= 0.0 || target_energy <= 0.0) {
    return kSiSnrCapDb;
  }
  return std::min(kSiSnrCapDb, 10.0 * std::log10(target_energy / residual_energy));
}

std::vector<BenchmarkRow> benchmark(const std::function<void(double)>& runner,
                                    std::span<const double> lengths_s, int repetitions) {
  if (!runner) {
    throw std::invalid_argument("benchmark: no runner");
  }
  if (repetitions < 1) {
    throw std::invalid_argument("benchmark: repetitions must be >= 1");
  }
  std::vector<BenchmarkRow> rows;
  rows.reserve(lengths_s.size());
  for (double length : lengths_s) {
    if (!(length > 0.0)) {
      throw std::invalid_argument("benchmark: lengths must be positive");
    }
    double total = 0.0;
    for (int rep = 0; rep < repetitions; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      try {
        runner(length);
      } catch (const std::exception& e) {
        throw std::runtime_error("benchmark: runner failed at length " +
                                 std::to_string(length) + " s: " + e.what());
      }
      total += std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                   .count();
    }
    BenchmarkRow row;
    row.length_s = length;
    row.mean_time_s = total / repetitions;
    row.rtf = row.mean_time_s / length;
    rows.push_back(row);
  }
  return rows;
}

void write_benchmark_csv(const std::filesystem::path& path,
                         std::span<const BenchmarkRow> rows,
                         std::span<const std::string> extra_names,
                         std::span<const std::vector<double>> extra_columns) {
  if (extra_names.size() != extra_columns.size()) {
    throw std::invalid_argument("benchmark csv: metric names/columns mismatch");
  }
  for (const auto& col : extra_columns) {
    if (col.size() != rows.size()) {
      throw std::invalid_argument("benchmark csv: metric column length mismatch");
    }
  }

  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("benchmark csv: cannot open " + path.string());
  }
  out << "length_s,mean_time_s,rtf";
  for (const auto& name : extra_names) {
    out << ',' << name;
  }
  out << '\n';
  out.precision(12);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << rows[i].length_s << ',' << rows[i].mean_time_s << ',' << rows[i].rtf;
    for (const auto& col : extra_columns) {
      out << ',' << col[i];
    }
    out << '\n';
  }
  if (!out) {
    throw std::runtime_error("benchmark csv: write failed: " + path.string());
  }
}

}  // namespace ouphase

#pragma once

#include "ouphase/spectrogram.hpp"

namespace ouphase {

/// Magnitude compression v -> beta * |v|^alpha * exp(j arg v). Phase is
/// preserved exactly; zero stays zero.
struct CompressionParams {
  double alpha = 0.5;
  double beta = 0.15;

  /// Requires 0 < alpha <= 1 and beta > 0 (throws std::invalid_argument).
  void validate() const;
};

ComplexField compress(const ComplexField& values, const CompressionParams& params);
ComplexField decompress(const ComplexField& values, const CompressionParams& params);

ComplexSpectrogram compress(const ComplexSpectrogram& spec, const CompressionParams& params);
ComplexSpectrogram decompress(const ComplexSpectrogram& spec, const CompressionParams& params);

}  // namespace ouphase

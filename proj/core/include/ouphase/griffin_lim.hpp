#pragma once

#include <optional>
#include <vector>

#include "ouphase/spectrogram.hpp"
#include "ouphase/stft.hpp"

namespace ouphase {

struct GlaConfig {
  int iterations = 200;
  /// Initial phase (radians) per bin; zero phase when absent.
  std::optional<RealField> init_phase;

  /// Requires iterations >= 0 (throws std::invalid_argument).
  void validate() const;
};

struct GlaResult {
  ComplexSpectrogram spectrogram;         ///< final iterate; magnitude equals A
  std::vector<double> residual_trace;     ///< ||S_k - P_C(S_k)||_F per iteration
};

/// Alternating-projection phase retrieval: starting from A with the initial
/// phase, repeat S <- magnitude_project(consistency_project(S), A). The
/// consistency projection computed for each iterate doubles as its residual,
/// so the trace costs nothing extra. A must be entrywise non-negative.
GlaResult gla(const RealField& magnitude, const GlaConfig& config,
              const StftEngine& engine);

}  // namespace ouphase

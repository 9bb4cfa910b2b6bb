#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>

#include "ouphase/spectrogram.hpp"
#include "ouphase/wave.hpp"

namespace ouphase {

/// Analysis/synthesis configuration. The window is a periodic Hann window of
/// `window_len` samples; frames advance by `hop` samples; the signal is
/// zero-padded by window_len/2 on both sides before framing, so a signal of
/// `len` samples yields floor(len/hop)+1 frames (even window length).
struct StftConfig {
  int window_len = 510;
  int hop = 128;
  int sample_rate = 16000;

  int bins() const { return window_len / 2 + 1; }

  /// FNV-1a hash of the fields; stamped onto spectrograms so that synthesis
  /// under a mismatched configuration is rejected.
  std::uint64_t fingerprint() const;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

/// Forward/inverse STFT engine.
///
/// The inverse is the least-squares one: window-weighted overlap-add
/// normalized by the summed squared window, which is the Moore-Penrose
/// pseudoinverse of the analysis map. Construction verifies on a probe signal
/// that analysis followed by synthesis reconstructs to within 1e-10 (relative,
/// max norm) and rejects window/hop pairs that cannot be inverted (e.g. hop
/// equal to the window length, whose Hann zeros leave samples uncovered).
///
/// stft/istft/consistency_project are safe to call concurrently on one engine
/// (per-call scratch, FFTW new-array execution); construction is not.
class StftEngine {
 public:
  explicit StftEngine(StftConfig config);
  ~StftEngine();

  StftEngine(StftEngine&& other) noexcept;
  StftEngine& operator=(StftEngine&& other) noexcept;
  StftEngine(const StftEngine&) = delete;
  StftEngine& operator=(const StftEngine&) = delete;

  const StftConfig& config() const { return config_; }
  const Eigen::ArrayXd& window() const { return window_; }

  /// Frames produced for a signal of `samples` length (must be >= 1).
  static Eigen::Index frame_count(Eigen::Index samples, const StftConfig& config);

  /// Forward transform. The waveform's sample rate must match the
  /// configuration; use the span overload for raw sample buffers.
  ComplexSpectrogram stft(const Waveform& wave) const;
  ComplexSpectrogram stft(std::span<const double> samples) const;

  /// Least-squares inverse, trimmed or zero-padded to `target_len` samples.
  /// Rejects spectrograms whose fingerprint names a different configuration
  /// and spectrograms with the wrong number of bins.
  Waveform istft(const ComplexSpectrogram& spec, Eigen::Index target_len) const;

  /// Projection onto the set of consistent spectrograms: istft followed by
  /// stft at a length that preserves the frame count. Idempotent; spectrograms
  /// of real signals are fixed points.
  ComplexSpectrogram consistency_project(const ComplexSpectrogram& spec) const;

 private:
  ComplexSpectrogram stft_padded(std::span<const double> samples) const;

  StftConfig config_;
  Eigen::ArrayXd window_;
  // FFTW plan handles (fftw_plan is a pointer typedef; kept as void* here to
  // keep fftw3.h out of the public header).
  void* plan_r2c_ = nullptr;
  void* plan_c2r_ = nullptr;
};

/// Replaces each bin's magnitude with `magnitude` while keeping its phase;
/// zero-magnitude bins get phase 0 by convention. `magnitude` must be
/// entrywise non-negative and shaped like `spec`.
ComplexSpectrogram magnitude_project(const ComplexSpectrogram& spec,
                                     const RealField& magnitude);

}  // namespace ouphase

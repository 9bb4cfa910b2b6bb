#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <filesystem>

namespace ouphase {

/// Dense complex-valued field, frequency bins along rows and frames (or any
/// second axis) along columns. Column-major storage, matching the column-wise
/// vec(.) convention used throughout.
using ComplexField = Eigen::ArrayXXcd;
using RealField = Eigen::ArrayXXd;

/// A complex spectrogram: K bins x L frames plus a fingerprint of the
/// analysis configuration that produced it (0 when unknown, e.g. for
/// hand-built arrays). Engines use the fingerprint to reject spectrograms
/// produced under a different window/hop/rate.
struct ComplexSpectrogram {
  ComplexField values;
  std::uint64_t config_fingerprint = 0;

  Eigen::Index bins() const { return values.rows(); }
  Eigen::Index frames() const { return values.cols(); }
};

/// Serializes a spectrogram: 16-byte header (magic "OUSP", format version u32,
/// k_bins u32, l_frames u32, little-endian) followed by k*l interleaved
/// little-endian float64 (re, im) pairs in column-major order. Round-trips
/// bit-exactly. The config fingerprint is not stored.
void save_spec(const std::filesystem::path& path, const ComplexSpectrogram& spec);

/// Reads a spectrogram written by save_spec. Throws std::runtime_error on a
/// bad magic, zero dimensions, or a payload size that disagrees with the header.
ComplexSpectrogram load_spec(const std::filesystem::path& path);

}  // namespace ouphase

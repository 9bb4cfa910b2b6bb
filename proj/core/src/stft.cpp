#include "ouphase/stft.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ouphase {
namespace {

// RAII wrapper around fftw_malloc so per-call scratch matches the alignment
// of the buffers the plans were created with.
template <typename T>
class FftwBuffer {
 public:
  explicit FftwBuffer(std::size_t n)
      : data_(static_cast<T*>(fftw_malloc(sizeof(T) * n))), size_(n) {
    if (!data_) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data_); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  T* data() { return data_; }
  std::size_t size() const { return size_; }

 private:
  T* data_;
  std::size_t size_;
};

fftw_plan as_plan(void* p) { return static_cast<fftw_plan>(p); }

constexpr double kReconstructionTol = 1e-10;

}  // namespace

std::uint64_t StftConfig::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(static_cast<std::uint64_t>(window_len));
  mix(static_cast<std::uint64_t>(hop));
  mix(static_cast<std::uint64_t>(sample_rate));
  return h;
}

void StftConfig::validate() const {
  if (window_len < 2) {
    throw std::invalid_argument("stft: window length must be >= 2");
  }
  if (hop < 1) {
    throw std::invalid_argument("stft: hop must be >= 1");
  }
  if (hop > window_len) {
    throw std::invalid_argument("stft: hop must not exceed the window length");
  }
  if (sample_rate < 1) {
    throw std::invalid_argument("stft: sample rate must be >= 1");
  }
}

Eigen::Index StftEngine::frame_count(Eigen::Index samples, const StftConfig& config) {
  if (samples < 1) {
    throw std::invalid_argument("stft: signal must contain at least one sample");
  }
  // Padded length is samples + 2*(window_len/2); the usual frame formula
  // floor((padded - window_len)/hop) + 1 simplifies accordingly.
  const Eigen::Index padded = samples + 2 * (config.window_len / 2);
  return (padded - config.window_len) / config.hop + 1;
}

StftEngine::StftEngine(StftConfig config) : config_(config) {
  config_.validate();

  const int n = config_.window_len;
  window_.resize(n);
  for (int i = 0; i < n; ++i) {
    window_[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / n));
  }

  FftwBuffer<double> real_buf(n);
  FftwBuffer<fftw_complex> cplx_buf(static_cast<std::size_t>(config_.bins()));
  // FFTW_ESTIMATE keeps planning deterministic (no runtime measurement).
  plan_r2c_ = fftw_plan_dft_r2c_1d(n, real_buf.data(), cplx_buf.data(), FFTW_ESTIMATE);
  plan_c2r_ = fftw_plan_dft_c2r_1d(n, cplx_buf.data(), real_buf.data(), FFTW_ESTIMATE);
  if (!plan_r2c_ || !plan_c2r_) {
    throw std::runtime_error("stft: FFTW plan creation failed");
  }

  // Perfect-reconstruction probe: a deterministic broadband signal longer than
  // the window, with a length that is not a hop multiple. This subsumes the
  // usual overlap-add coverage condition: any window/hop pair that leaves
  // samples uncovered or badly conditioned fails here and is rejected.
  const Eigen::Index probe_len = 4 * static_cast<Eigen::Index>(n) + 37;
  std::vector<double> probe(static_cast<std::size_t>(probe_len));
  for (Eigen::Index i = 0; i < probe_len; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(probe_len);
    probe[static_cast<std::size_t>(i)] =
        0.5 * std::sin(2.0 * std::numbers::pi * 7.0 * u) +
        0.3 * std::cos(2.0 * std::numbers::pi * 41.0 * u) + 0.1 * (u - 0.5);
  }
  try {
    const ComplexSpectrogram spec = stft(std::span<const double>(probe));
    const Waveform rec = istft(spec, probe_len);
    double max_err = 0.0, max_ref = 0.0;
    for (Eigen::Index i = 0; i < probe_len; ++i) {
      max_err = std::max(max_err, std::abs(rec.samples[static_cast<std::size_t>(i)] -
                                           probe[static_cast<std::size_t>(i)]));
      max_ref = std::max(max_ref, std::abs(probe[static_cast<std::size_t>(i)]));
    }
    if (max_err > kReconstructionTol * max_ref) {
      throw std::invalid_argument(
          "stft: window/hop pair fails the perfect-reconstruction check "
          "(relative error " + std::to_string(max_err / max_ref) + ")");
    }
  } catch (const std::runtime_error& e) {
    // e.g. uncovered samples -> zero normalization denominator during synthesis
    fftw_destroy_plan(as_plan(plan_r2c_));
    fftw_destroy_plan(as_plan(plan_c2r_));
    plan_r2c_ = plan_c2r_ = nullptr;
    throw std::invalid_argument(std::string("stft: window/hop pair is not invertible: ") +
                                e.what());
  } catch (...) {
    fftw_destroy_plan(as_plan(plan_r2c_));
    fftw_destroy_plan(as_plan(plan_c2r_));
    plan_r2c_ = plan_c2r_ = nullptr;
    throw;
  }
}

StftEngine::~StftEngine() {
  if (plan_r2c_) fftw_destroy_plan(as_plan(plan_r2c_));
  if (plan_c2r_) fftw_destroy_plan(as_plan(plan_c2r_));
}

StftEngine::StftEngine(StftEngine&& other) noexcept
    : config_(other.config_),
      window_(std::move(other.window_)),
      plan_r2c_(std::exchange(other.plan_r2c_, nullptr)),
      plan_c2r_(std::exchange(other.plan_c2r_, nullptr)) {}

StftEngine& StftEngine::operator=(StftEngine&& other) noexcept {
  if (this != &other) {
    if (plan_r2c_) fftw_destroy_plan(as_plan(plan_r2c_));
    if (plan_c2r_) fftw_destroy_plan(as_plan(plan_c2r_));
    config_ = other.config_;
    window_ = std::move(other.window_);
    plan_r2c_ = std::exchange(other.plan_r2c_, nullptr);
    plan_c2r_ = std::exchange(other.plan_c2r_, nullptr);
  }
  return *this;
}

ComplexSpectrogram StftEngine::stft(const Waveform& wave) const {
  if (wave.sample_rate != config_.sample_rate) {
    throw std::invalid_argument("stft: waveform sample rate " +
                                std::to_string(wave.sample_rate) +
                                " does not match configured rate " +
                                std::to_string(config_.sample_rate));
  }
  return stft(std::span<const double>(wave.samples));
}

ComplexSpectrogram StftEngine::stft(std::span<const double> samples) const {
  const Eigen::Index len = static_cast<Eigen::Index>(samples.size());
  const Eigen::Index frames = frame_count(len, config_);
  const int n = config_.window_len;
  const int k = config_.bins();
  const int pad = n / 2;

  ComplexSpectrogram spec;
  spec.values.resize(k, frames);
  spec.config_fingerprint = config_.fingerprint();

  FftwBuffer<double> frame(static_cast<std::size_t>(n));
  FftwBuffer<fftw_complex> bins(static_cast<std::size_t>(k));

  for (Eigen::Index m = 0; m < frames; ++m) {
    const Eigen::Index start = m * config_.hop - pad;  // position in the unpadded signal
    for (int i = 0; i < n; ++i) {
      const Eigen::Index src = start + i;
      const double s = (src >= 0 && src < len) ? samples[static_cast<std::size_t>(src)] : 0.0;
      frame.data()[i] = s * window_[i];
    }
    fftw_execute_dft_r2c(as_plan(plan_r2c_), frame.data(), bins.data());
    for (int b = 0; b < k; ++b) {
      spec.values(b, m) = std::complex<double>(bins.data()[b][0], bins.data()[b][1]);
    }
  }
  return spec;
}

Waveform StftEngine::istft(const ComplexSpectrogram& spec, Eigen::Index target_len) const {
  if (spec.config_fingerprint != 0 && spec.config_fingerprint != config_.fingerprint()) {
    throw std::invalid_argument(
        "istft: spectrogram was produced under a different configuration");
  }
  if (spec.bins() != config_.bins()) {
    throw std::invalid_argument("istft: expected " + std::to_string(config_.bins()) +
                                " bins, got " + std::to_string(spec.bins()));
  }
  if (spec.frames() < 1) {
    throw std::invalid_argument("istft: spectrogram has no frames");
  }
  if (target_len < 0) {
    throw std::invalid_argument("istft: target length must be non-negative");
  }

  const int n = config_.window_len;
  const int k = config_.bins();
  const int hop = config_.hop;
  const int pad = n / 2;
  const Eigen::Index frames = spec.frames();
  const Eigen::Index ola_len = (frames - 1) * hop + n;

  Eigen::ArrayXd numer = Eigen::ArrayXd::Zero(ola_len);
  Eigen::ArrayXd denom = Eigen::ArrayXd::Zero(ola_len);

  FftwBuffer<fftw_complex> bins(static_cast<std::size_t>(k));
  FftwBuffer<double> frame(static_cast<std::size_t>(n));

  for (Eigen::Index m = 0; m < frames; ++m) {
    for (int b = 0; b < k; ++b) {
      bins.data()[b][0] = spec.values(b, m).real();
      bins.data()[b][1] = spec.values(b, m).imag();
    }
    // A real signal has real DC (and Nyquist, for even windows); drop any
    // imaginary leakage there so inconsistent inputs are handled by
    // projection rather than FFTW-dependent behavior.
    bins.data()[0][1] = 0.0;
    if (n % 2 == 0) bins.data()[k - 1][1] = 0.0;
    fftw_execute_dft_c2r(as_plan(plan_c2r_), bins.data(), frame.data());

    const Eigen::Index off = m * hop;
    for (int i = 0; i < n; ++i) {
      // c2r output is unnormalized (scaled by n).
      numer[off + i] += (frame.data()[i] / n) * window_[i];
      denom[off + i] += window_[i] * window_[i];
    }
  }

  const double denom_floor = 1e-12 * denom.maxCoeff();

  Waveform out;
  out.sample_rate = config_.sample_rate;
  out.samples.assign(static_cast<std::size_t>(target_len), 0.0);
  for (Eigen::Index i = 0; i < target_len; ++i) {
    const Eigen::Index p = i + pad;
    if (p >= ola_len) break;  // beyond frame coverage: stays zero-padded
    if (denom[p] <= denom_floor) {
      throw std::runtime_error("istft: zero normalization denominator at sample " +
                               std::to_string(i));
    }
    out.samples[static_cast<std::size_t>(i)] = numer[p] / denom[p];
  }
  return out;
}

ComplexSpectrogram StftEngine::consistency_project(const ComplexSpectrogram& spec) const {
  // The longest signal that still yields spec.frames() frames: frames stay
  // intact and nothing a consistent spectrogram encodes is truncated away.
  const Eigen::Index len = spec.frames() * config_.hop - 1;
  const Waveform wave = istft(spec, len);
  return stft(std::span<const double>(wave.samples));
}

ComplexSpectrogram magnitude_project(const ComplexSpectrogram& spec,
                                     const RealField& magnitude) {
  if (magnitude.rows() != spec.values.rows() || magnitude.cols() != spec.values.cols()) {
    throw std::invalid_argument("magnitude_project: shape mismatch");
  }

  ComplexSpectrogram out;
  out.config_fingerprint = spec.config_fingerprint;
  out.values.resize(spec.values.rows(), spec.values.cols());
  for (Eigen::Index j = 0; j < spec.values.cols(); ++j) {
    for (Eigen::Index i = 0; i < spec.values.rows(); ++i) {
      const double a = magnitude(i, j);
      if (!(a >= 0.0)) {
        throw std::invalid_argument("magnitude_project: magnitudes must be non-negative");
      }
      const std::complex<double> v = spec.values(i, j);
      const double m = std::abs(v);
      // Zero-magnitude bins carry no phase; use phase 0 by convention.
      out.values(i, j) = m == 0.0 ? std::complex<double>(a, 0.0) : (v / m) * a;
    }
  }
  return out;
}

}  // namespace ouphase

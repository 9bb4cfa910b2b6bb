#include "ouphase/transforms.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace ouphase {
namespace {

// Shared kernel: map each bin's magnitude through `f`, keeping the phase by
// scaling the unit vector v/|v| (no trigonometry, so phase is preserved to
// the last bit of the division).
template <typename F>
ComplexField map_magnitude(const ComplexField& values, F&& f) {
  ComplexField out(values.rows(), values.cols());
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      const std::complex<double> v = values(i, j);
      const double m = std::abs(v);
      out(i, j) = m == 0.0 ? std::complex<double>(0.0, 0.0) : (v / m) * f(m);
    }
  }
  return out;
}

}  // namespace

void CompressionParams::validate() const {
  if (!(alpha > 0.0) || !(alpha <= 1.0)) {
    throw std::invalid_argument("compression: alpha must be in (0, 1]");
  }
  if (!(beta > 0.0)) {
    throw std::invalid_argument("compression: beta must be positive");
  }
}

ComplexField compress(const ComplexField& values, const CompressionParams& params) {
  params.validate();
  return map_magnitude(values,
                       [&](double m) { return params.beta * std::pow(m, params.alpha); });
}

ComplexField decompress(const ComplexField& values, const CompressionParams& params) {
  params.validate();
  return map_magnitude(
      values, [&](double m) { return std::pow(m / params.beta, 1.0 / params.alpha); });
}

ComplexSpectrogram compress(const ComplexSpectrogram& spec, const CompressionParams& params) {
  return {compress(spec.values, params), spec.config_fingerprint};
}

ComplexSpectrogram decompress(const ComplexSpectrogram& spec, const CompressionParams& params) {
  return {decompress(spec.values, params), spec.config_fingerprint};
}

}  // namespace ouphase

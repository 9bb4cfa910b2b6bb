#include "ouphase/griffin_lim.hpp"

#include <complex>
#include <stdexcept>

namespace ouphase {

void GlaConfig::validate() const {
  if (iterations < 0) {
    throw std::invalid_argument("gla: iterations must be >= 0");
  }
}

GlaResult gla(const RealField& magnitude, const GlaConfig& config,
              const StftEngine& engine) {
  config.validate();
  if (!(magnitude >= 0.0).all()) {
    throw std::invalid_argument("gla: magnitudes must be non-negative");
  }
  if (config.init_phase &&
      (config.init_phase->rows() != magnitude.rows() ||
       config.init_phase->cols() != magnitude.cols())) {
    throw std::invalid_argument("gla: init phase shape mismatch");
  }

  GlaResult result;
  ComplexSpectrogram& s = result.spectrogram;
  s.config_fingerprint = engine.config().fingerprint();
  s.values.resize(magnitude.rows(), magnitude.cols());
  for (Eigen::Index j = 0; j < magnitude.cols(); ++j) {
    for (Eigen::Index i = 0; i < magnitude.rows(); ++i) {
      s.values(i, j) = config.init_phase
                           ? std::polar(magnitude(i, j), (*config.init_phase)(i, j))
                           : std::complex<double>(magnitude(i, j), 0.0);
    }
  }

  result.residual_trace.reserve(static_cast<std::size_t>(config.iterations));
  for (int k = 0; k < config.iterations; ++k) {
    ComplexSpectrogram consistent = engine.consistency_project(s);
    result.residual_trace.push_back(
        (s.values - consistent.values).matrix().norm());
    s = magnitude_project(consistent, magnitude);
  }
  return result;
}

}  // namespace ouphase

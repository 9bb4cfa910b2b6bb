#include "ouphase/sde.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ouphase {
namespace {

constexpr double kTimeSlack = 1e-12;  // tolerance for grid endpoints hit inexactly

void check_same_shape(const ComplexField& a, const ComplexField& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
  }
}

void check_time_range(double t, double lo, double hi, const char* what) {
  if (!(t >= lo - kTimeSlack) || !(t <= hi + kTimeSlack)) {
    throw std::invalid_argument(std::string(what) + ": t=" + std::to_string(t) +
                                " outside [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
  }
}

}  // namespace

double OuveParams::log_ratio() const { return std::log(sigma_max / sigma_min); }

void OuveParams::validate() const {
  if (!(sigma_min > 0.0) || !(sigma_max > sigma_min)) {
    throw std::invalid_argument("sde: need 0 < sigma_min < sigma_max");
  }
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("sde: gamma must be positive");
  }
  if (!(t_eps > 0.0) || !(t_eps < t_max)) {
    throw std::invalid_argument("sde: need 0 < t_eps < t_max");
  }
  if (!(gamma + log_ratio() > 0.0)) {
    throw std::invalid_argument("sde: gamma + ln(sigma_max/sigma_min) must be positive");
  }
}

ComplexField drift(const ComplexField& x, const ComplexField& y, const OuveParams& params) {
  check_same_shape(x, y, "drift");
  return params.gamma * (y - x);
}

double diffusion(double t, const OuveParams& params) {
  check_time_range(t, 0.0, params.t_max, "diffusion");
  const double lr = params.log_ratio();
  return params.sigma_min * std::pow(params.sigma_max / params.sigma_min, t) *
         std::sqrt(2.0 * lr);
}

ComplexField mean(const ComplexField& x0, const ComplexField& y, double t,
                  const OuveParams& params) {
  check_same_shape(x0, y, "mean");
  check_time_range(t, 0.0, params.t_max, "mean");
  const double decay = std::exp(-params.gamma * t);
  return decay * x0 + (1.0 - decay) * y;
}

double variance(double t, const OuveParams& params) {
  check_time_range(t, 0.0, params.t_max, "variance");
  const double lr = params.log_ratio();
  const double s = params.gamma + lr;
  // sigma_min^2 * (r^{2t} - e^{-2 gamma t}) * lr / s, written via expm1 so the
  // value is exactly zero at t = 0 and accurate for small t.
  return params.sigma_min * params.sigma_min * std::exp(-2.0 * params.gamma * t) *
         std::expm1(2.0 * t * s) * lr / s;
}

double std_dev(double t, const OuveParams& params) { return std::sqrt(variance(t, params)); }

ComplexField sample_complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("sample_complex_gaussian: dimensions must be positive");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = std::sqrt(0.5);
  ComplexField z(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng) * scale;
      const double im = normal(rng) * scale;
      z(i, j) = std::complex<double>(re, im);
    }
  }
  return z;
}

ForwardSample sample_forward(const ComplexField& x0, const ComplexField& y, double t,
                             const OuveParams& params, Rng& rng) {
  check_same_shape(x0, y, "sample_forward");
  check_time_range(t, 0.0, params.t_max, "sample_forward");
  ForwardSample out;
  out.z = sample_complex_gaussian(x0.rows(), x0.cols(), rng);
  out.x_t = mean(x0, y, t, params) + std_dev(t, params) * out.z;
  return out;
}

ComplexField sample_terminal(const ComplexField& y, const OuveParams& params, Rng& rng) {
  return y + std_dev(params.t_max, params) *
                 sample_complex_gaussian(y.rows(), y.cols(), rng);
}

ComplexField analytic_score(const ComplexField& x_t, const ComplexField& x0,
                            const ComplexField& y, double t, const OuveParams& params) {
  check_same_shape(x_t, x0, "analytic_score");
  check_same_shape(x_t, y, "analytic_score");
  check_time_range(t, params.t_eps, params.t_max, "analytic_score");
  const double var = variance(t, params);
  return -(x_t - mean(x0, y, t, params)) / var;
}

}  // namespace ouphase

#include "ouphase/score.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "ouphase/score_net.hpp"

namespace ouphase {

TimeEmbedding TimeEmbedding::log_spaced(int dim, double f_min, double f_max) {
  if (dim < 2 || dim % 2 != 0) {
    throw std::invalid_argument("time embedding: dim must be even and >= 2");
  }
  if (!(f_min > 0.0) || !(f_max > f_min)) {
    throw std::invalid_argument("time embedding: need 0 < f_min < f_max");
  }
  const int half = dim / 2;
  TimeEmbedding emb;
  emb.frequencies.resize(half);
  if (half == 1) {
    emb.frequencies[0] = f_min;
  } else {
    const double step = (std::log(f_max) - std::log(f_min)) / (half - 1);
    for (int i = 0; i < half; ++i) {
      emb.frequencies[i] = std::exp(std::log(f_min) + i * step);
    }
  }
  return emb;
}

Eigen::ArrayXd embed_time(double t, const TimeEmbedding& embedding) {
  const int half = static_cast<int>(embedding.frequencies.size());
  if (half < 1) {
    throw std::invalid_argument("time embedding: no frequencies configured");
  }
  Eigen::ArrayXd out(2 * half);
  for (int i = 0; i < half; ++i) {
    out[i] = std::sin(embedding.frequencies[i] * t);
    out[half + i] = std::cos(embedding.frequencies[i] * t);
  }
  return out;
}

double dsm_loss(const ComplexField& s_pred, const ComplexField& z, double sigma_t) {
  if (s_pred.rows() != z.rows() || s_pred.cols() != z.cols()) {
    throw std::invalid_argument("dsm_loss: shape mismatch");
  }
  if (!(sigma_t > 0.0)) {
    throw std::invalid_argument("dsm_loss: sigma must be positive");
  }
  double acc = 0.0;
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const std::complex<double> r = s_pred(i, j) + z(i, j) / sigma_t;
      acc += r.real() * r.real() + r.imag() * r.imag();
    }
  }
  return acc;
}

AnalyticScore::AnalyticScore(ComplexField x0, OuveParams params)
    : x0_(std::move(x0)), params_(params) {
  params_.validate();
}

ComplexField AnalyticScore::evaluate(const ComplexField& x_t, const ComplexField& y,
                                     double t) const {
  return analytic_score(x_t, x0_, y, t, params_);
}

NetScore::NetScore(std::shared_ptr<const SmallScoreNet> net, OuveParams params)
    : net_(std::move(net)), params_(params) {
  if (!net_) {
    throw std::invalid_argument("NetScore: null network");
  }
  params_.validate();
}

ComplexField NetScore::evaluate(const ComplexField& x_t, const ComplexField& y,
                                double t) const {
  return net_->raw_output(x_t, y, t) / std_dev(t, params_);
}

}  // namespace ouphase

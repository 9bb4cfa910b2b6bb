#include "ouphase/score_net.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace ouphase {
namespace {

using Eigen::Index;
using Eigen::MatrixXf;
using Eigen::VectorXf;

constexpr int kInChannels = 4;
constexpr int kEnc1 = 16;
constexpr int kEnc2 = 32;
constexpr int kMid = 32;
constexpr int kDec2 = 16;
constexpr int kDec1 = 16;
constexpr int kOutChannels = 2;

// Feature maps are stored as (H*W, C) column-major matrices: one contiguous
// column per channel, spatial index p = h + H*w. This makes im2col a series
// of contiguous column-segment copies and convolution a single GEMM.

void im2col3x3(const MatrixXf& in, Index h_dim, Index w_dim, MatrixXf& col) {
  const Index channels = in.cols();
  col.setZero(h_dim * w_dim, channels * 9);
  for (Index c = 0; c < channels; ++c) {
    for (int kx = -1; kx <= 1; ++kx) {
      for (int ky = -1; ky <= 1; ++ky) {
        const Index dst = c * 9 + (kx + 1) * 3 + (ky + 1);
        const Index h_lo = ky < 0 ? 1 : 0;
        const Index len = h_dim - std::abs(ky);
        for (Index w = 0; w < w_dim; ++w) {
          const Index wp = w + kx;
          if (wp < 0 || wp >= w_dim) continue;
          col.block(h_dim * w + h_lo, dst, len, 1) =
              in.block(h_dim * wp + h_lo + ky, c, len, 1);
        }
      }
    }
  }
}

// Adjoint of im2col3x3: scatter-add column gradients back onto the image.
void col2im3x3_add(const MatrixXf& dcol, Index h_dim, Index w_dim, MatrixXf& din) {
  const Index channels = din.cols();
  for (Index c = 0; c < channels; ++c) {
    for (int kx = -1; kx <= 1; ++kx) {
      for (int ky = -1; ky <= 1; ++ky) {
        const Index src = c * 9 + (kx + 1) * 3 + (ky + 1);
        const Index h_lo = ky < 0 ? 1 : 0;
        const Index len = h_dim - std::abs(ky);
        for (Index w = 0; w < w_dim; ++w) {
          const Index wp = w + kx;
          if (wp < 0 || wp >= w_dim) continue;
          din.block(h_dim * wp + h_lo + ky, c, len, 1) +=
              dcol.block(h_dim * w + h_lo, src, len, 1);
        }
      }
    }
  }
}

MatrixXf avgpool2(const MatrixXf& in, Index h_dim, Index w_dim) {
  const Index channels = in.cols();
  const Index h2 = h_dim / 2, w2 = w_dim / 2;
  MatrixXf out(h2 * w2, channels);
  for (Index c = 0; c < channels; ++c) {
    for (Index w = 0; w < w2; ++w) {
      for (Index h = 0; h < h2; ++h) {
        const Index p = 2 * h + h_dim * 2 * w;
        out(h + h2 * w, c) =
            0.25f * (in(p, c) + in(p + 1, c) + in(p + h_dim, c) + in(p + h_dim + 1, c));
      }
    }
  }
  return out;
}

MatrixXf avgpool2_backward(const MatrixXf& dout, Index h_dim, Index w_dim) {
  const Index channels = dout.cols();
  const Index h2 = h_dim / 2, w2 = w_dim / 2;
  MatrixXf din(h_dim * w_dim, channels);
  for (Index c = 0; c < channels; ++c) {
    for (Index w = 0; w < w2; ++w) {
      for (Index h = 0; h < h2; ++h) {
        const float g = 0.25f * dout(h + h2 * w, c);
        const Index p = 2 * h + h_dim * 2 * w;
        din(p, c) = g;
        din(p + 1, c) = g;
        din(p + h_dim, c) = g;
        din(p + h_dim + 1, c) = g;
      }
    }
  }
  return din;
}

// in: coarse (h_dim * w_dim, C); out: nearest-neighbor doubled (2h * 2w, C).
MatrixXf upsample2(const MatrixXf& in, Index h_dim, Index w_dim) {
  const Index channels = in.cols();
  const Index hf = 2 * h_dim;
  MatrixXf out(4 * h_dim * w_dim, channels);
  for (Index c = 0; c < channels; ++c) {
    for (Index w = 0; w < w_dim; ++w) {
      for (Index h = 0; h < h_dim; ++h) {
        const float v = in(h + h_dim * w, c);
        const Index q = 2 * h + hf * 2 * w;
        out(q, c) = v;
        out(q + 1, c) = v;
        out(q + hf, c) = v;
        out(q + hf + 1, c) = v;
      }
    }
  }
  return out;
}

MatrixXf upsample2_backward(const MatrixXf& dout, Index h_dim, Index w_dim) {
  const Index channels = dout.cols();
  const Index hf = 2 * h_dim;
  MatrixXf din(h_dim * w_dim, channels);
  for (Index c = 0; c < channels; ++c) {
    for (Index w = 0; w < w_dim; ++w) {
      for (Index h = 0; h < h_dim; ++h) {
        const Index q = 2 * h + hf * 2 * w;
        din(h + h_dim * w, c) =
            dout(q, c) + dout(q + 1, c) + dout(q + hf, c) + dout(q + hf + 1, c);
      }
    }
  }
  return din;
}

void relu_inplace(MatrixXf& m) { m = m.cwiseMax(0.0f); }

void relu_mask(MatrixXf& grad, const MatrixXf& activation) {
  grad.array() *= (activation.array() > 0.0f).cast<float>();
}

}  // namespace

struct SmallScoreNet::Cache {
  Index k_bins = 0, l_frames = 0;  // true field shape
  Index h = 0, w = 0;              // padded canvas shape
  VectorXf temb;
  MatrixXf x4;
  MatrixXf col1, a1, p1;
  MatrixXf col2, a2, p2;
  MatrixXf colm, am;
  MatrixXf cat2, cold2, ad2;
  MatrixXf cat1, cold1, ad1;
  MatrixXf out;
};

SmallScoreNet::SmallScoreNet(std::uint64_t init_seed, int time_dim)
    : embedding_(TimeEmbedding::log_spaced(time_dim)) {
  enc1_.w.resize(kEnc1, kInChannels * 9);
  enc1_.b = VectorXf::Zero(kEnc1);
  enc2_.w.resize(kEnc2, kEnc1 * 9);
  enc2_.b = VectorXf::Zero(kEnc2);
  mid_.w.resize(kMid, kEnc2 * 9);
  mid_.b = VectorXf::Zero(kMid);
  tproj_w_.resize(kMid, embedding_.dim());
  tproj_b_ = VectorXf::Zero(kMid);
  dec2_.w.resize(kDec2, (kMid + kEnc2) * 9);
  dec2_.b = VectorXf::Zero(kDec2);
  dec1_.w.resize(kDec1, (kDec2 + kEnc1) * 9);
  dec1_.b = VectorXf::Zero(kDec1);
  out_.w = MatrixXf::Zero(kOutChannels, kDec1);  // zero-init: untrained net predicts 0
  out_.b = VectorXf::Zero(kOutChannels);

  Rng rng(init_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto he_fill = [&](MatrixXf& w) {
    const double std_dev = std::sqrt(2.0 / static_cast<double>(w.cols()));
    float* data = w.data();
    for (Index i = 0; i < w.size(); ++i) {
      data[i] = static_cast<float>(normal(rng) * std_dev);
    }
  };
  he_fill(enc1_.w);
  he_fill(enc2_.w);
  he_fill(mid_.w);
  he_fill(tproj_w_);
  he_fill(dec2_.w);
  he_fill(dec1_.w);
}

std::vector<std::pair<std::string, std::vector<Index>>> SmallScoreNet::tensor_shapes() const {
  auto shape = [](const auto& m) {
    return std::vector<Index>{m.rows(), m.cols()};
  };
  return {
      {"enc1.w", shape(enc1_.w)}, {"enc1.b", shape(enc1_.b)},
      {"enc2.w", shape(enc2_.w)}, {"enc2.b", shape(enc2_.b)},
      {"mid.w", shape(mid_.w)},   {"mid.b", shape(mid_.b)},
      {"tproj.w", shape(tproj_w_)}, {"tproj.b", shape(tproj_b_)},
      {"dec2.w", shape(dec2_.w)}, {"dec2.b", shape(dec2_.b)},
      {"dec1.w", shape(dec1_.w)}, {"dec1.b", shape(dec1_.b)},
      {"out.w", shape(out_.w)},   {"out.b", shape(out_.b)},
  };
}

std::size_t SmallScoreNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, shape] : tensor_shapes()) {
    n += static_cast<std::size_t>(shape[0] * shape[1]);
  }
  return n;
}

std::vector<double> SmallScoreNet::serialize() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  auto push = [&out](const auto& m) {
    const float* data = m.data();
    for (Index i = 0; i < m.size(); ++i) out.push_back(static_cast<double>(data[i]));
  };
  push(enc1_.w); push(enc1_.b);
  push(enc2_.w); push(enc2_.b);
  push(mid_.w);  push(mid_.b);
  push(tproj_w_); push(tproj_b_);
  push(dec2_.w); push(dec2_.b);
  push(dec1_.w); push(dec1_.b);
  push(out_.w);  push(out_.b);
  return out;
}

void SmallScoreNet::deserialize(std::span<const double> values) {
  if (values.size() != parameter_count()) {
    throw std::invalid_argument("score net: parameter count mismatch (expected " +
                                std::to_string(parameter_count()) + ", got " +
                                std::to_string(values.size()) + ")");
  }
  std::size_t pos = 0;
  auto pull = [&](auto& m) {
    float* data = m.data();
    for (Index i = 0; i < m.size(); ++i) {
      data[i] = static_cast<float>(values[pos++]);
    }
  };
  pull(enc1_.w); pull(enc1_.b);
  pull(enc2_.w); pull(enc2_.b);
  pull(mid_.w);  pull(mid_.b);
  pull(tproj_w_); pull(tproj_b_);
  pull(dec2_.w); pull(dec2_.b);
  pull(dec1_.w); pull(dec1_.b);
  pull(out_.w);  pull(out_.b);
}

SmallScoreNet::Gradients SmallScoreNet::make_gradients() const {
  Gradients g;
  g.enc1_w = MatrixXf::Zero(enc1_.w.rows(), enc1_.w.cols());
  g.enc1_b = VectorXf::Zero(enc1_.b.size());
  g.enc2_w = MatrixXf::Zero(enc2_.w.rows(), enc2_.w.cols());
  g.enc2_b = VectorXf::Zero(enc2_.b.size());
  g.mid_w = MatrixXf::Zero(mid_.w.rows(), mid_.w.cols());
  g.mid_b = VectorXf::Zero(mid_.b.size());
  g.tproj_w = MatrixXf::Zero(tproj_w_.rows(), tproj_w_.cols());
  g.tproj_b = VectorXf::Zero(tproj_b_.size());
  g.dec2_w = MatrixXf::Zero(dec2_.w.rows(), dec2_.w.cols());
  g.dec2_b = VectorXf::Zero(dec2_.b.size());
  g.dec1_w = MatrixXf::Zero(dec1_.w.rows(), dec1_.w.cols());
  g.dec1_b = VectorXf::Zero(dec1_.b.size());
  g.out_w = MatrixXf::Zero(out_.w.rows(), out_.w.cols());
  g.out_b = VectorXf::Zero(out_.b.size());
  return g;
}

ComplexField SmallScoreNet::forward(const ComplexField& x_t, const ComplexField& y,
                                    double t, Cache* cache) const {
  if (x_t.rows() != y.rows() || x_t.cols() != y.cols()) {
    throw std::invalid_argument("score net: x_t and y shapes differ");
  }
  if (x_t.size() == 0) {
    throw std::invalid_argument("score net: empty input");
  }

  Cache local;
  Cache& c = cache ? *cache : local;
  c.k_bins = x_t.rows();
  c.l_frames = x_t.cols();
  // Two pooling stages need the canvas divisible by 4; pad with zeros and
  // crop on the way out.
  c.h = (c.k_bins + 3) / 4 * 4;
  c.w = (c.l_frames + 3) / 4 * 4;
  const Index h = c.h, w = c.w;
  const Index h2 = h / 2, w2 = w / 2, h4 = h / 4, w4 = w / 4;

  c.x4.setZero(h * w, kInChannels);
  for (Index j = 0; j < c.l_frames; ++j) {
    for (Index i = 0; i < c.k_bins; ++i) {
      const Index p = i + h * j;
      c.x4(p, 0) = static_cast<float>(x_t(i, j).real());
      c.x4(p, 1) = static_cast<float>(x_t(i, j).imag());
      c.x4(p, 2) = static_cast<float>(y(i, j).real());
      c.x4(p, 3) = static_cast<float>(y(i, j).imag());
    }
  }

  c.temb = embed_time(t, embedding_).matrix().cast<float>();

  auto conv = [](const MatrixXf& in, Index hd, Index wd, const Conv& layer,
                 MatrixXf& col, MatrixXf& out) {
    im2col3x3(in, hd, wd, col);
    out.noalias() = col * layer.w.transpose();
    out.rowwise() += layer.b.transpose();
  };

  conv(c.x4, h, w, enc1_, c.col1, c.a1);
  relu_inplace(c.a1);
  c.p1 = avgpool2(c.a1, h, w);

  conv(c.p1, h2, w2, enc2_, c.col2, c.a2);
  relu_inplace(c.a2);
  c.p2 = avgpool2(c.a2, h2, w2);

  conv(c.p2, h4, w4, mid_, c.colm, c.am);
  const VectorXf tbias = tproj_w_ * c.temb + tproj_b_;
  c.am.rowwise() += tbias.transpose();
  relu_inplace(c.am);

  c.cat2.resize(h2 * w2, kMid + kEnc2);
  c.cat2.leftCols(kMid) = upsample2(c.am, h4, w4);
  c.cat2.rightCols(kEnc2) = c.a2;
  conv(c.cat2, h2, w2, dec2_, c.cold2, c.ad2);
  relu_inplace(c.ad2);

  c.cat1.resize(h * w, kDec2 + kEnc1);
  c.cat1.leftCols(kDec2) = upsample2(c.ad2, h2, w2);
  c.cat1.rightCols(kEnc1) = c.a1;
  conv(c.cat1, h, w, dec1_, c.cold1, c.ad1);
  relu_inplace(c.ad1);

  c.out.noalias() = c.ad1 * out_.w.transpose();
  c.out.rowwise() += out_.b.transpose();

  ComplexField r(c.k_bins, c.l_frames);
  for (Index j = 0; j < c.l_frames; ++j) {
    for (Index i = 0; i < c.k_bins; ++i) {
      const Index p = i + h * j;
      r(i, j) = std::complex<double>(c.out(p, 0), c.out(p, 1));
    }
  }
  return r;
}

ComplexField SmallScoreNet::raw_output(const ComplexField& x_t, const ComplexField& y,
                                       double t) const {
  return forward(x_t, y, t, nullptr);
}

double SmallScoreNet::accumulate_gradients(const ComplexField& x_t, const ComplexField& y,
                                           double t, const ComplexField& z, double sigma_t,
                                           Gradients& grads) const {
  if (z.rows() != x_t.rows() || z.cols() != x_t.cols()) {
    throw std::invalid_argument("score net: z shape differs from x_t");
  }
  if (!(sigma_t > 0.0)) {
    throw std::invalid_argument("score net: sigma must be positive");
  }

  Cache c;
  forward(x_t, y, t, &c);
  const Index h = c.h, w = c.w;
  const Index h2 = h / 2, w2 = w / 2, h4 = h / 4, w4 = w / 4;

  // Loss sum |R + z|^2 / sigma^2 over the true (unpadded) region; the padded
  // border contributes nothing and receives zero output gradient.
  const double inv_var = 1.0 / (sigma_t * sigma_t);
  double loss = 0.0;
  MatrixXf dout = MatrixXf::Zero(h * w, kOutChannels);
  for (Index j = 0; j < c.l_frames; ++j) {
    for (Index i = 0; i < c.k_bins; ++i) {
      const Index p = i + h * j;
      const double r_re = static_cast<double>(c.out(p, 0)) + z(i, j).real();
      const double r_im = static_cast<double>(c.out(p, 1)) + z(i, j).imag();
      loss += (r_re * r_re + r_im * r_im) * inv_var;
      dout(p, 0) = static_cast<float>(2.0 * r_re * inv_var);
      dout(p, 1) = static_cast<float>(2.0 * r_im * inv_var);
    }
  }

  // 1x1 output projection
  grads.out_w.noalias() += dout.transpose() * c.ad1;
  grads.out_b.noalias() += dout.colwise().sum().transpose();
  MatrixXf d_ad1 = dout * out_.w;

  // dec1
  relu_mask(d_ad1, c.ad1);
  grads.dec1_w.noalias() += d_ad1.transpose() * c.cold1;
  grads.dec1_b.noalias() += d_ad1.colwise().sum().transpose();
  MatrixXf dcat1 = MatrixXf::Zero(h * w, kDec2 + kEnc1);
  {
    const MatrixXf dcol = d_ad1 * dec1_.w;
    col2im3x3_add(dcol, h, w, dcat1);
  }
  MatrixXf d_a1 = dcat1.rightCols(kEnc1);  // skip-connection branch
  MatrixXf d_ad2 = upsample2_backward(dcat1.leftCols(kDec2), h2, w2);

  // dec2
  relu_mask(d_ad2, c.ad2);
  grads.dec2_w.noalias() += d_ad2.transpose() * c.cold2;
  grads.dec2_b.noalias() += d_ad2.colwise().sum().transpose();
  MatrixXf dcat2 = MatrixXf::Zero(h2 * w2, kMid + kEnc2);
  {
    const MatrixXf dcol = d_ad2 * dec2_.w;
    col2im3x3_add(dcol, h2, w2, dcat2);
  }
  MatrixXf d_a2 = dcat2.rightCols(kEnc2);
  MatrixXf d_am = upsample2_backward(dcat2.leftCols(kMid), h4, w4);

  // bottleneck (conv bias and time projection share the per-channel sum)
  relu_mask(d_am, c.am);
  grads.mid_w.noalias() += d_am.transpose() * c.colm;
  const VectorXf d_channel = d_am.colwise().sum().transpose();
  grads.mid_b.noalias() += d_channel;
  grads.tproj_w.noalias() += d_channel * c.temb.transpose();
  grads.tproj_b.noalias() += d_channel;
  MatrixXf d_p2 = MatrixXf::Zero(h4 * w4, kEnc2);
  {
    const MatrixXf dcol = d_am * mid_.w;
    col2im3x3_add(dcol, h4, w4, d_p2);
  }
  d_a2 += avgpool2_backward(d_p2, h2, w2);

  // enc2
  relu_mask(d_a2, c.a2);
  grads.enc2_w.noalias() += d_a2.transpose() * c.col2;
  grads.enc2_b.noalias() += d_a2.colwise().sum().transpose();
  MatrixXf d_p1 = MatrixXf::Zero(h2 * w2, kEnc1);
  {
    const MatrixXf dcol = d_a2 * enc2_.w;
    col2im3x3_add(dcol, h2, w2, d_p1);
  }
  d_a1 += avgpool2_backward(d_p1, h, w);

  // enc1 (input gradient not needed)
  relu_mask(d_a1, c.a1);
  grads.enc1_w.noalias() += d_a1.transpose() * c.col1;
  grads.enc1_b.noalias() += d_a1.colwise().sum().transpose();

  return loss;
}

void SmallScoreNet::apply_update(const Gradients& grads, double learning_rate) {
  const float lr = static_cast<float>(learning_rate);
  enc1_.w -= lr * grads.enc1_w;
  enc1_.b -= lr * grads.enc1_b;
  enc2_.w -= lr * grads.enc2_w;
  enc2_.b -= lr * grads.enc2_b;
  mid_.w -= lr * grads.mid_w;
  mid_.b -= lr * grads.mid_b;
  tproj_w_ -= lr * grads.tproj_w;
  tproj_b_ -= lr * grads.tproj_b;
  dec2_.w -= lr * grads.dec2_w;
  dec2_.b -= lr * grads.dec2_b;
  dec1_.w -= lr * grads.dec1_w;
  dec1_.b -= lr * grads.dec1_b;
  out_.w -= lr * grads.out_w;
  out_.b -= lr * grads.out_b;
}

void SmallScoreNet::apply_adam(const Gradients& grads, AdamState& state,
                               double learning_rate, double grad_scale, double beta1,
                               double beta2, double epsilon) {
  const std::size_t count = parameter_count();
  if (state.m.empty()) {
    state.m.assign(count, 0.0);
    state.v.assign(count, 0.0);
  }
  if (state.m.size() != count || state.v.size() != count) {
    throw std::invalid_argument("score net: Adam state sized for a different model");
  }
  state.step += 1;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));

  std::size_t pos = 0;
  auto update = [&](auto& param, const auto& grad) {
    float* p = param.data();
    const float* g = grad.data();
    for (Index i = 0; i < param.size(); ++i, ++pos) {
      const double gi = static_cast<double>(g[i]) * grad_scale;
      state.m[pos] = beta1 * state.m[pos] + (1.0 - beta1) * gi;
      state.v[pos] = beta2 * state.v[pos] + (1.0 - beta2) * gi * gi;
      const double step_i =
          learning_rate * (state.m[pos] / c1) / (std::sqrt(state.v[pos] / c2) + epsilon);
      p[i] = static_cast<float>(static_cast<double>(p[i]) - step_i);
    }
  };
  update(enc1_.w, grads.enc1_w);
  update(enc1_.b, grads.enc1_b);
  update(enc2_.w, grads.enc2_w);
  update(enc2_.b, grads.enc2_b);
  update(mid_.w, grads.mid_w);
  update(mid_.b, grads.mid_b);
  update(tproj_w_, grads.tproj_w);
  update(tproj_b_, grads.tproj_b);
  update(dec2_.w, grads.dec2_w);
  update(dec2_.b, grads.dec2_b);
  update(dec1_.w, grads.dec1_w);
  update(dec1_.b, grads.dec1_b);
  update(out_.w, grads.out_w);
  update(out_.b, grads.out_b);
}

}  // namespace ouphase

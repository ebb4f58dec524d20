#include "cyberevent/nn.h"

#include <cmath>

#include "cyberevent/errors.h"

namespace cyber {
namespace {

double uniform_pm(std::mt19937_64& rng, double bound) {
  double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return (2.0 * u - 1.0) * bound;
}

}  // namespace

void zero_grads(const ParamList& params) {
  for (Param* p : params) p->zero_grad();
}

void write_params(Container& c, const ParamList& params) {
  for (const Param* p : params) c.put_matrix(p->name, p->value);
}

void read_params(const Container& c, const ParamList& params) {
  for (Param* p : params) {
    Eigen::MatrixXd m = c.dense(p->name);
    if (m.rows() != p->value.rows() || m.cols() != p->value.cols()) {
      throw ShapeError("parameter '" + p->name + "' has shape " +
                       std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                       ", expected " + std::to_string(p->value.rows()) + "x" +
                       std::to_string(p->value.cols()));
    }
    p->value = std::move(m);
    p->zero_grad();
  }
}

void init_uniform(Param& p, double bound, std::mt19937_64& rng) {
  for (Eigen::Index j = 0; j < p.value.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.value.rows(); ++i) {
      p.value(i, j) = uniform_pm(rng, bound);
    }
  }
}

void init_glorot(Param& p, Eigen::Index fan_in, Eigen::Index fan_out,
                 std::mt19937_64& rng) {
  init_uniform(p, std::sqrt(6.0 / static_cast<double>(fan_in + fan_out)), rng);
}

Conv1d::Conv1d(const std::string& name, int in_channels, int out_channels,
               int kernel, bool same_padding)
    : in_(in_channels),
      out_(out_channels),
      kernel_(kernel),
      same_(same_padding),
      weight_(name + ".weight", out_channels, kernel * in_channels),
      bias_(name + ".bias", out_channels, 1) {
  if (same_padding && kernel % 2 == 0) {
    throw ConfigError("same-padded convolution needs an odd kernel");
  }
}

Eigen::Index Conv1d::output_length(Eigen::Index length) const {
  return same_ ? length : length - kernel_ + 1;
}

Eigen::MatrixXd Conv1d::forward(const Eigen::MatrixXd& x, Eigen::Index length,
                                Cache* cache) const {
  if (x.rows() != in_ || length <= 0 || x.cols() % length != 0) {
    throw ShapeError("conv1d '" + weight_.name + "': bad input shape");
  }
  const Eigen::Index batch = x.cols() / length;
  const Eigen::Index out_len = output_length(length);
  if (out_len <= 0) {
    throw ShapeError("conv1d '" + weight_.name + "': input length " +
                     std::to_string(length) + " shorter than kernel " +
                     std::to_string(kernel_));
  }
  const Eigen::Index pad = same_ ? (kernel_ - 1) / 2 : 0;
  Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(kernel_ * in_, out_len * batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    for (int k = 0; k < kernel_; ++k) {
      // Output position p reads input position p + k - pad.
      Eigen::Index p0 = std::max<Eigen::Index>(0, pad - k);
      Eigen::Index p1 = std::min<Eigen::Index>(out_len, length + pad - k);
      if (p1 <= p0) continue;
      cols.block(k * in_, b * out_len + p0, in_, p1 - p0) =
          x.block(0, b * length + p0 + k - pad, in_, p1 - p0);
    }
  }
  Eigen::MatrixXd y = weight_.value * cols;
  y.colwise() += bias_.value.col(0);
  if (cache) {
    cache->cols = std::move(cols);
    cache->length = length;
  }
  return y;
}

Eigen::MatrixXd Conv1d::backward(const Eigen::MatrixXd& dout, const Cache& cache,
                                 bool want_input_grad) {
  weight_.grad.noalias() += dout * cache.cols.transpose();
  bias_.grad.col(0) += dout.rowwise().sum();
  if (!want_input_grad) return {};
  const Eigen::Index length = cache.length;
  const Eigen::Index out_len = output_length(length);
  const Eigen::Index batch = dout.cols() / out_len;
  const Eigen::Index pad = same_ ? (kernel_ - 1) / 2 : 0;
  Eigen::MatrixXd dcols = weight_.value.transpose() * dout;
  Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(in_, length * batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    for (int k = 0; k < kernel_; ++k) {
      Eigen::Index p0 = std::max<Eigen::Index>(0, pad - k);
      Eigen::Index p1 = std::min<Eigen::Index>(out_len, length + pad - k);
      if (p1 <= p0) continue;
      dx.block(0, b * length + p0 + k - pad, in_, p1 - p0) +=
          dcols.block(k * in_, b * out_len + p0, in_, p1 - p0);
    }
  }
  return dx;
}

void Conv1d::init(std::mt19937_64& rng) {
  // He-uniform for ReLU layers.
  init_uniform(weight_, std::sqrt(6.0 / (kernel_ * in_)), rng);
  bias_.value.setZero();
}

Dense::Dense(const std::string& name, int in, int out)
    : weight_(name + ".weight", out, in), bias_(name + ".bias", out, 1) {}

Eigen::MatrixXd Dense::forward(const Eigen::MatrixXd& x) const {
  if (x.rows() != weight_.value.cols()) {
    throw ShapeError("dense '" + weight_.name + "': input has " +
                     std::to_string(x.rows()) + " rows, expected " +
                     std::to_string(weight_.value.cols()));
  }
  Eigen::MatrixXd y = weight_.value * x;
  y.colwise() += bias_.value.col(0);
  return y;
}

Eigen::MatrixXd Dense::backward(const Eigen::MatrixXd& dout, const Eigen::MatrixXd& x,
                                bool want_input_grad) {
  weight_.grad.noalias() += dout * x.transpose();
  bias_.grad.col(0) += dout.rowwise().sum();
  if (!want_input_grad) return {};
  return weight_.value.transpose() * dout;
}

void Dense::init(std::mt19937_64& rng) {
  init_glorot(weight_, weight_.value.cols(), weight_.value.rows(), rng);
  bias_.value.setZero();
}

Lstm::Lstm(const std::string& name, int input, int hidden)
    : input_(input),
      hidden_(hidden),
      wx_(name + ".wx", 4 * hidden, input),
      wh_(name + ".wh", 4 * hidden, hidden),
      b_(name + ".bias", 4 * hidden, 1) {}

Eigen::VectorXd Lstm::forward(const Eigen::MatrixXd& x, Cache* cache) const {
  if (x.rows() != input_) throw ShapeError("lstm '" + wx_.name + "': bad input size");
  const Eigen::Index t_max = x.cols();
  const int h = hidden_;
  Eigen::VectorXd hs = Eigen::VectorXd::Zero(h), cs = Eigen::VectorXd::Zero(h);
  if (cache) {
    cache->x = x;
    cache->gates.resize(4 * h, t_max);
    cache->c = Eigen::MatrixXd::Zero(h, t_max + 1);
    cache->h = Eigen::MatrixXd::Zero(h, t_max + 1);
  }
  Eigen::VectorXd z(4 * h);
  for (Eigen::Index t = 0; t < t_max; ++t) {
    z.noalias() = wx_.value * x.col(t);
    z.noalias() += wh_.value * hs;
    z += b_.value.col(0);
    for (int i = 0; i < h; ++i) {
      z[i] = sigmoid(z[i]);
      z[h + i] = sigmoid(z[h + i]);
      z[2 * h + i] = std::tanh(z[2 * h + i]);
      z[3 * h + i] = sigmoid(z[3 * h + i]);
    }
    cs = z.segment(h, h).cwiseProduct(cs) + z.head(h).cwiseProduct(z.segment(2 * h, h));
    hs = z.segment(3 * h, h).cwiseProduct(cs.array().tanh().matrix());
    if (cache) {
      cache->gates.col(t) = z;
      cache->c.col(t + 1) = cs;
      cache->h.col(t + 1) = hs;
    }
  }
  return hs;
}

void Lstm::backward(const Eigen::VectorXd& dh_final, const Cache& cache) {
  const int h = hidden_;
  const Eigen::Index t_max = cache.x.cols();
  Eigen::VectorXd dh = dh_final;
  Eigen::VectorXd dc = Eigen::VectorXd::Zero(h);
  Eigen::VectorXd dz(4 * h);
  for (Eigen::Index t = t_max - 1; t >= 0; --t) {
    const auto gi = cache.gates.col(t).segment(0, h).array();
    const auto gf = cache.gates.col(t).segment(h, h).array();
    const auto gg = cache.gates.col(t).segment(2 * h, h).array();
    const auto go = cache.gates.col(t).segment(3 * h, h).array();
    const Eigen::ArrayXd tc = cache.c.col(t + 1).array().tanh();
    const Eigen::ArrayXd c_prev = cache.c.col(t).array();
    Eigen::ArrayXd dct = dc.array() + dh.array() * go * (1.0 - tc.square());
    dz.segment(0, h) = (dct * gg * gi * (1.0 - gi)).matrix();
    dz.segment(h, h) = (dct * c_prev * gf * (1.0 - gf)).matrix();
    dz.segment(2 * h, h) = (dct * gi * (1.0 - gg.square())).matrix();
    dz.segment(3 * h, h) = (dh.array() * tc * go * (1.0 - go)).matrix();
    wx_.grad.noalias() += dz * cache.x.col(t).transpose();
    wh_.grad.noalias() += dz * cache.h.col(t).transpose();
    b_.grad.col(0) += dz;
    dh = wh_.value.transpose() * dz;
    dc = (dct * gf).matrix();
  }
}

void Lstm::init(std::mt19937_64& rng) {
  init_glorot(wx_, input_, 4 * hidden_, rng);
  init_glorot(wh_, hidden_, 4 * hidden_, rng);
  b_.value.setZero();
  b_.value.block(hidden_, 0, hidden_, 1).setOnes();  // forget-gate bias
}

Adam::Adam(ParamList params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
  for (const Param* p : params_) {
    m_.push_back(Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
  }
}

void Adam::step() {
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Param& p = *params_[i];
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * p.grad;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * p.grad.cwiseAbs2();
    p.value.array() -= config_.learning_rate * (m_[i].array() / c1) /
                       ((v_[i].array() / c2).sqrt() + config_.epsilon);
  }
}

void Adam::write(Container& c, const std::string& prefix) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    c.put_matrix(prefix + ".m." + params_[i]->name, m_[i]);
    c.put_matrix(prefix + ".v." + params_[i]->name, v_[i]);
  }
  Eigen::VectorXd t(1);
  t[0] = static_cast<double>(t_);
  c.put_vector(prefix + ".t", t);
}

void Adam::read(const Container& c, const std::string& prefix) {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    m_[i] = c.dense(prefix + ".m." + params_[i]->name);
    v_[i] = c.dense(prefix + ".v." + params_[i]->name);
  }
  t_ = static_cast<long>(c.vector(prefix + ".t")[0]);
}

void sgd_step(const ParamList& params, double learning_rate) {
  for (Param* p : params) p->value -= learning_rate * p->grad;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  Eigen::VectorXd e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

}  // namespace cyber

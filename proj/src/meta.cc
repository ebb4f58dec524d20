#include "cyberevent/meta.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <spdlog/spdlog.h>

#include "cyberevent/errors.h"

namespace cyber {
namespace {

Eigen::MatrixXd relu(const Eigen::MatrixXd& x) { return x.cwiseMax(0.0); }

Eigen::MatrixXd relu_grad(const Eigen::MatrixXd& dout, const Eigen::MatrixXd& pre) {
  return (pre.array() > 0.0).select(dout, 0.0);
}

// Views an F x (D * batch) activation as (F * D) x batch.
Eigen::Map<const Eigen::MatrixXd> flatten(const Eigen::MatrixXd& m, Eigen::Index batch) {
  return {m.data(), m.size() / batch, batch};
}

}  // namespace

MetaEncoder::MetaEncoder(int dim, int filters, int kernel, std::uint64_t seed)
    : dim_(dim),
      filters_(filters),
      kernel_(kernel),
      enc1_("meta.enc1", 3, filters, kernel, true),
      enc2_("meta.enc2", filters, filters, kernel, true),
      to_latent_("meta.latent", filters * dim, dim),
      from_latent_("meta.unlatent", dim, filters * dim),
      dec1_("meta.dec1", filters, filters, kernel, true),
      dec2_("meta.dec2", filters, 3, kernel, true) {
  if (dim <= 0 || filters <= 0) throw ConfigError("meta-encoder: bad dimensions");
  std::mt19937_64 rng(seed);
  enc1_.init(rng);
  enc2_.init(rng);
  to_latent_.init(rng);
  from_latent_.init(rng);
  dec1_.init(rng);
  dec2_.init(rng);
}

ParamList MetaEncoder::parameters() {
  ParamList out;
  for (auto* layer : {&enc1_, &enc2_}) {
    auto p = layer->parameters();
    out.insert(out.end(), p.begin(), p.end());
  }
  for (auto* layer : {&to_latent_, &from_latent_}) {
    auto p = layer->parameters();
    out.insert(out.end(), p.begin(), p.end());
  }
  for (auto* layer : {&dec1_, &dec2_}) {
    auto p = layer->parameters();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

bool MetaEncoder::all_finite() {
  for (const Param* p : parameters()) {
    if (!p->value.allFinite()) return false;
  }
  return true;
}

Eigen::MatrixXd MetaEncoder::encode_batch(const Eigen::MatrixXd& x) const {
  if (x.rows() != 3 || x.cols() % dim_ != 0 || x.cols() == 0) {
    throw ShapeError("meta-encoder: expected a 3 x (" + std::to_string(dim_) +
                     " * batch) input, got " + std::to_string(x.rows()) + "x" +
                     std::to_string(x.cols()));
  }
  const Eigen::Index batch = x.cols() / dim_;
  Eigen::MatrixXd a1 = relu(enc1_.forward(x, dim_, nullptr));
  Eigen::MatrixXd a2 = relu(enc2_.forward(a1, dim_, nullptr));
  return to_latent_.forward(flatten(a2, batch));
}

Eigen::MatrixXd MetaEncoder::reconstruct_batch(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd z = encode_batch(x);
  const Eigen::Index batch = z.cols();
  Eigen::MatrixXd u = relu(from_latent_.forward(z));
  Eigen::Map<const Eigen::MatrixXd> u_seq(u.data(), filters_, dim_ * batch);
  Eigen::MatrixXd a3 = relu(dec1_.forward(u_seq, dim_, nullptr));
  return dec2_.forward(a3, dim_, nullptr);
}

Eigen::VectorXd MetaEncoder::encode(const TokenStack& stack) const {
  if (stack.rows() != 3 || stack.cols() != dim_) {
    throw ShapeError("meta-encoder: token stack is " + std::to_string(stack.rows()) +
                     "x" + std::to_string(stack.cols()) + ", expected 3x" +
                     std::to_string(dim_));
  }
  return encode_batch(Eigen::MatrixXd(stack)).col(0);
}

TokenStack MetaEncoder::decode(const Eigen::VectorXd& latent) const {
  if (latent.size() != dim_) throw ShapeError("meta-encoder: latent size mismatch");
  Eigen::MatrixXd u = relu(from_latent_.forward(latent));
  Eigen::Map<const Eigen::MatrixXd> u_seq(u.data(), filters_, dim_);
  Eigen::MatrixXd a3 = relu(dec1_.forward(u_seq, dim_, nullptr));
  return TokenStack(dec2_.forward(a3, dim_, nullptr));
}

TokenStack MetaEncoder::reconstruct(const TokenStack& stack) const {
  return TokenStack(reconstruct_batch(Eigen::MatrixXd(stack)));
}

double MetaEncoder::loss(const Eigen::MatrixXd& x, bool accumulate_gradient) {
  const Eigen::Index batch = x.cols() / dim_;
  Conv1d::Cache c1, c2, c3, c4;
  Eigen::MatrixXd p1 = enc1_.forward(x, dim_, &c1);
  Eigen::MatrixXd a1 = relu(p1);
  Eigen::MatrixXd p2 = enc2_.forward(a1, dim_, &c2);
  Eigen::MatrixXd a2 = relu(p2);
  Eigen::MatrixXd flat = flatten(a2, batch);
  Eigen::MatrixXd z = to_latent_.forward(flat);
  Eigen::MatrixXd pu = from_latent_.forward(z);
  Eigen::MatrixXd u = relu(pu);
  Eigen::MatrixXd u_seq = Eigen::Map<const Eigen::MatrixXd>(u.data(), filters_, dim_ * batch);
  Eigen::MatrixXd p3 = dec1_.forward(u_seq, dim_, &c3);
  Eigen::MatrixXd a3 = relu(p3);
  Eigen::MatrixXd y = dec2_.forward(a3, dim_, &c4);

  const double scale = 1.0 / static_cast<double>(x.size());
  Eigen::MatrixXd diff = y - x;
  const double value = diff.squaredNorm() * scale;
  if (!accumulate_gradient) return value;

  Eigen::MatrixXd dy = 2.0 * scale * diff;
  Eigen::MatrixXd da3 = dec2_.backward(dy, c4, true);
  Eigen::MatrixXd du_seq = dec1_.backward(relu_grad(da3, p3), c3, true);
  Eigen::Map<const Eigen::MatrixXd> du(du_seq.data(), filters_ * dim_, batch);
  Eigen::MatrixXd dz = from_latent_.backward(relu_grad(du, pu), z, true);
  Eigen::MatrixXd dflat = to_latent_.backward(dz, flat, true);
  Eigen::Map<const Eigen::MatrixXd> da2(dflat.data(), filters_, dim_ * batch);
  Eigen::MatrixXd da1 = enc2_.backward(relu_grad(da2, p2), c2, true);
  enc1_.backward(relu_grad(da1, p1), c1, false);
  return value;
}

Container MetaEncoder::to_container() const {
  Container c("meta-encoder");
  c.put_text("shape", std::to_string(dim_) + " " + std::to_string(filters_) + " " +
                          std::to_string(kernel_));
  write_params(c, const_cast<MetaEncoder*>(this)->parameters());
  Eigen::VectorXd tr = Eigen::Map<const Eigen::VectorXd>(
      history.train_loss.data(), static_cast<Eigen::Index>(history.train_loss.size()));
  Eigen::VectorXd va = Eigen::Map<const Eigen::VectorXd>(
      history.validation_loss.data(),
      static_cast<Eigen::Index>(history.validation_loss.size()));
  c.put_vector("history.train_loss", tr);
  c.put_vector("history.validation_loss", va);
  c.put_text("history.best_epoch", std::to_string(history.best_epoch));
  return c;
}

MetaEncoder MetaEncoder::from_container(const Container& c) {
  std::istringstream shape(c.text("shape"));
  int dim = 0, filters = 0, kernel = 0;
  if (!(shape >> dim >> filters >> kernel)) throw IoError("meta-encoder: bad shape block");
  MetaEncoder m(dim, filters, kernel, 0);
  read_params(c, m.parameters());
  auto tr = c.vector("history.train_loss");
  auto va = c.vector("history.validation_loss");
  m.history.train_loss.assign(tr.data(), tr.data() + tr.size());
  m.history.validation_loss.assign(va.data(), va.data() + va.size());
  m.history.best_epoch = std::stoi(c.text("history.best_epoch"));
  return m;
}

MetaEncoder MetaEncoder::load(const std::string& path) {
  return from_container(Container::load(path, "meta-encoder"));
}

Eigen::MatrixXd pack_stacks(const std::vector<TokenStack>& stacks,
                            const std::vector<std::size_t>& order,
                            std::size_t begin, std::size_t end) {
  const Eigen::Index d = stacks.front().cols();
  Eigen::MatrixXd x(3, d * static_cast<Eigen::Index>(end - begin));
  for (std::size_t i = begin; i < end; ++i) {
    x.middleCols(static_cast<Eigen::Index>(i - begin) * d, d) = stacks[order[i]];
  }
  return x;
}

MetaEncoder train_meta_encoder(const std::vector<TokenStack>& stacks,
                               const MetaTrainConfig& config) {
  if (stacks.size() < 10) {
    throw InsufficientDataError("meta-encoder needs at least 10 stacks, got " +
                                std::to_string(stacks.size()));
  }
  if (config.epochs < 1) throw ConfigError("meta-encoder: epochs must be >= 1");
  if (!(config.validation_split > 0.0 && config.validation_split < 1.0)) {
    throw ConfigError("meta-encoder: validation_split must lie in (0, 1)");
  }
  const Eigen::Index dim = stacks.front().cols();
  for (const auto& s : stacks) {
    if (s.rows() != 3 || s.cols() != dim) {
      throw ShapeError("meta-encoder: all stacks must be 3 x " + std::to_string(dim));
    }
  }

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(stacks.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t n_val = static_cast<std::size_t>(
      std::llround(static_cast<double>(stacks.size()) * config.validation_split));
  n_val = std::clamp<std::size_t>(n_val, 1, stacks.size() - 1);
  std::vector<std::size_t> val_idx(order.end() - static_cast<std::ptrdiff_t>(n_val), order.end());
  std::vector<std::size_t> train_idx(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_val));

  std::size_t batch = static_cast<std::size_t>(std::max(config.batch_size, 1));
  if (batch > train_idx.size()) {
    spdlog::warn("meta-encoder: batch size {} clamped to {} training stacks", batch,
                 train_idx.size());
    batch = train_idx.size();
  }

  MetaEncoder model(static_cast<int>(dim), 32, 3, rng());
  const ParamList params = model.parameters();
  const Eigen::MatrixXd val = pack_stacks(stacks, val_idx, 0, val_idx.size());

  MetaEncoder best = model;
  double best_val = std::numeric_limits<double>::infinity();
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    if (config.shuffle) std::shuffle(train_idx.begin(), train_idx.end(), rng);
    double train_sum = 0;
    for (std::size_t b = 0; b < train_idx.size(); b += batch) {
      std::size_t e = std::min(b + batch, train_idx.size());
      Eigen::MatrixXd x = pack_stacks(stacks, train_idx, b, e);
      zero_grads(params);
      double l = model.loss(x, true);
      train_sum += l * static_cast<double>(e - b);
      sgd_step(params, config.learning_rate);
    }
    const double train_loss = train_sum / static_cast<double>(train_idx.size());
    const double val_loss = model.loss(val, false);
    if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
      throw DivergenceError("meta-encoder loss became non-finite in epoch " +
                            std::to_string(epoch));
    }
    model.history.train_loss.push_back(train_loss);
    model.history.validation_loss.push_back(val_loss);
    spdlog::debug("meta-encoder epoch {}: train {:.6g} val {:.6g}", epoch, train_loss,
                  val_loss);
    if (val_loss < best_val) {
      best_val = val_loss;
      model.history.best_epoch = epoch;
      best = model;
    }
  }
  best.history = model.history;
  return best;
}

std::vector<TokenStack> vocabulary_stacks(const EmbeddingSet& embeddings) {
  std::vector<TokenStack> out;
  const auto& vocab = embeddings.vocab();
  for (std::size_t i = 1; i < vocab.size(); ++i) {
    out.push_back(embeddings.lookup_stack(vocab.token(static_cast<int>(i))));
  }
  return out;
}

Eigen::VectorXd encode_token(const TokenStack& stack, const MetaEncoder& encoder) {
  return encoder.encode(stack);
}

RowMatrix encode_sequence(const PaddedSequence& tweet, const EmbeddingSet& embeddings,
                          const MetaEncoder& encoder) {
  RowMatrix out = RowMatrix::Zero(static_cast<Eigen::Index>(tweet.max_length()),
                                  encoder.dim());
  for (std::size_t t = 0; t < tweet.length(); ++t) {
    out.row(static_cast<Eigen::Index>(t)) =
        encoder.encode(embeddings.lookup_stack(tweet.tokens[t])).transpose();
  }
  return out;
}

}  // namespace cyber

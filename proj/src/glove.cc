#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <spdlog/spdlog.h>

#include "cyberevent/embeddings.h"
#include "cyberevent/errors.h"
#include "skipgram.h"

namespace cyber {
namespace {

double weight(double x, const GloveConfig& c) {
  return x < c.x_max ? std::pow(x / c.x_max, c.alpha_weight) : 1.0;
}

}  // namespace

Cooccurrence build_cooccurrence(const std::vector<TokenizedTweet>& corpus,
                                const Vocabulary& vocab, int window) {
  if (window <= 0) throw ConfigError("GloVe: window must be positive");
  Cooccurrence x;
  for (const auto& t : corpus) {
    auto ids = vocab.known_indices(t);
    const int n = static_cast<int>(ids.size());
    for (int i = 0; i < n; ++i) {
      for (int d = 1; d <= window && i + d < n; ++d) {
        const double inc = 1.0 / d;
        x[{ids[i], ids[i + d]}] += inc;
        x[{ids[i + d], ids[i]}] += inc;
      }
    }
  }
  return x;
}

double glove_objective(const Cooccurrence& x, const GloveParams& p,
                       const GloveConfig& config) {
  double j = 0;
  for (const auto& [key, value] : x) {
    const auto [wi, ci] = key;
    double diff = p.word.row(wi).dot(p.context.row(ci)) + p.word_bias[wi] +
                  p.context_bias[ci] - std::log(value);
    j += 0.5 * weight(value, config) * diff * diff;
  }
  return j;
}

EmbeddingTable train_glove(const std::vector<TokenizedTweet>& corpus,
                           const Vocabulary& vocab, const GloveConfig& config,
                           TrainingTrace* trace) {
  if (config.dim <= 0) throw ConfigError("GloVe: dim must be positive");
  if (config.epochs < 0) throw ConfigError("GloVe: epochs must be >= 0");
  if (config.learning_rate <= 0) throw ConfigError("GloVe: learning_rate must be positive");
  const Cooccurrence x = build_cooccurrence(corpus, vocab, config.window);
  if (x.empty()) throw DataError("GloVe: co-occurrence matrix is all zero");

  const int v = static_cast<int>(vocab.size());
  const int d = config.dim;
  std::mt19937_64 rng(config.seed);
  auto init = [&](RowMatrix& m) {
    m.resize(v, d);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      m.data()[i] = (internal::uniform01(rng) - 0.5) / d;
    }
    m.row(0).setZero();
  };
  GloveParams p;
  init(p.word);
  init(p.context);
  p.word_bias = Eigen::VectorXd::Zero(v);
  p.context_bias = Eigen::VectorXd::Zero(v);

  // AdaGrad accumulators start at 1 as in the reference implementation.
  RowMatrix gw = RowMatrix::Ones(v, d), gc = RowMatrix::Ones(v, d);
  Eigen::VectorXd gbw = Eigen::VectorXd::Ones(v), gbc = Eigen::VectorXd::Ones(v);

  std::vector<std::pair<std::pair<int, int>, double>> entries(x.begin(), x.end());
  if (trace) trace->loss.push_back(glove_objective(x, p, config));
  if (config.epochs == 0) {
    spdlog::warn("GloVe: epochs=0, returning the initial random table");
  }
  Eigen::VectorXd tw(d), tc(d);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(entries.begin(), entries.end(), rng);
    for (const auto& [key, value] : entries) {
      const auto [wi, ci] = key;
      const double diff = p.word.row(wi).dot(p.context.row(ci)) + p.word_bias[wi] +
                          p.context_bias[ci] - std::log(value);
      const double fdiff = weight(value, config) * diff;
      tw = fdiff * p.context.row(ci).transpose();
      tc = fdiff * p.word.row(wi).transpose();
      p.word.row(wi).array() -=
          config.learning_rate * tw.transpose().array() / gw.row(wi).array().sqrt();
      p.context.row(ci).array() -=
          config.learning_rate * tc.transpose().array() / gc.row(ci).array().sqrt();
      gw.row(wi).array() += tw.transpose().array().square();
      gc.row(ci).array() += tc.transpose().array().square();
      p.word_bias[wi] -= config.learning_rate * fdiff / std::sqrt(gbw[wi]);
      p.context_bias[ci] -= config.learning_rate * fdiff / std::sqrt(gbc[ci]);
      gbw[wi] += fdiff * fdiff;
      gbc[ci] += fdiff * fdiff;
    }
    const double j = glove_objective(x, p, config);
    if (!std::isfinite(j)) {
      throw DivergenceError("GloVe objective became non-finite in epoch " +
                            std::to_string(epoch + 1));
    }
    spdlog::debug("GloVe epoch {}: objective {:.6f}", epoch + 1, j);
    if (trace) trace->loss.push_back(j);
  }
  RowMatrix table = p.word + p.context;
  table.row(0).setZero();
  return EmbeddingTable{Channel::kGlove, vocab, std::move(table)};
}

}  // namespace cyber

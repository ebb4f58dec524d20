#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "cyberevent/embeddings.h"
#include "cyberevent/errors.h"
#include "skipgram.h"

namespace cyber {
namespace internal {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// -log(sigmoid(x)) without overflow.
double neg_log_sigmoid(double x) {
  return x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

}  // namespace

NoiseSampler::NoiseSampler(const Vocabulary& vocab) {
  cumulative_.resize(vocab.size(), 0.0);
  double acc = 0;
  for (std::size_t i = 1; i < vocab.size(); ++i) {
    acc += std::pow(static_cast<double>(vocab.count(static_cast<int>(i))), 0.75);
    cumulative_[i] = acc;
  }
}

int NoiseSampler::sample(std::mt19937_64& rng) const {
  double u = uniform01(rng) * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin() + 1, cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return static_cast<int>(it - cumulative_.begin());
}

void validate(const SkipGramConfig& config) {
  if (config.iters <= 0) throw ConfigError("skip-gram: iters must be positive");
  if (config.window <= 0) throw ConfigError("skip-gram: window must be positive");
  if (config.dim <= 0) throw ConfigError("skip-gram: dim must be positive");
  if (config.alpha <= 0) throw ConfigError("skip-gram: alpha must be positive");
}

std::vector<std::vector<int>> index_sentences(
    const std::vector<TokenizedTweet>& corpus, const Vocabulary& vocab) {
  std::vector<std::vector<int>> out;
  out.reserve(corpus.size());
  for (const auto& t : corpus) {
    auto ids = vocab.known_indices(t);
    if (ids.size() >= 2) out.push_back(std::move(ids));
  }
  return out;
}

void run_skipgram(const std::vector<std::vector<int>>& sentences,
                  const Vocabulary& vocab,
                  const std::vector<std::vector<int>>& input_rows,
                  RowMatrix& input, RowMatrix& output,
                  const SkipGramConfig& config, std::mt19937_64& rng,
                  TrainingTrace* trace) {
  const NoiseSampler noise(vocab);
  const int dim = config.dim;
  double total_words = 0;
  for (const auto& s : sentences) total_words += static_cast<double>(s.size());
  const double schedule = total_words * config.iters;
  double processed = 0;

  Eigen::VectorXd hidden(dim), grad(dim);
  for (int iter = 0; iter < config.iters; ++iter) {
    double loss = 0;
    std::size_t pairs = 0;
    for (const auto& sentence : sentences) {
      const int n = static_cast<int>(sentence.size());
      for (int pos = 0; pos < n; ++pos) {
        const double lr =
            config.alpha * std::max(1.0 - processed / std::max(schedule, 1.0), 1e-4);
        processed += 1;
        const int center = sentence[pos];
        const auto& rows = input_rows[center];
        const int span = config.window - static_cast<int>(rng() % config.window);
        for (int c = std::max(0, pos - span); c <= std::min(n - 1, pos + span); ++c) {
          if (c == pos) continue;
          hidden.setZero();
          for (int r : rows) hidden += input.row(r).transpose();
          hidden /= static_cast<double>(rows.size());
          grad.setZero();
          const int context = sentence[c];
          for (int d = 0; d <= config.negatives; ++d) {
            int target = context;
            double label = 1.0;
            if (d > 0) {
              target = noise.sample(rng);
              if (target == context) continue;
              label = 0.0;
            }
            const double score = output.row(target).dot(hidden);
            loss += label > 0 ? neg_log_sigmoid(score) : neg_log_sigmoid(-score);
            const double g = lr * (label - sigmoid(score));
            grad += g * output.row(target).transpose();
            output.row(target) += g * hidden.transpose();
          }
          for (int r : rows) input.row(r) += grad.transpose();
          ++pairs;
        }
      }
    }
    const double mean = pairs > 0 ? loss / static_cast<double>(pairs) : 0.0;
    if (!std::isfinite(mean)) {
      throw DivergenceError("skip-gram loss became non-finite in iteration " +
                            std::to_string(iter + 1));
    }
    spdlog::debug("skip-gram iter {}: mean loss {:.6f} over {} pairs", iter + 1,
                  mean, pairs);
    if (trace) trace->loss.push_back(mean);
  }
}

}  // namespace internal

EmbeddingTable train_word2vec(const std::vector<TokenizedTweet>& corpus,
                              const Vocabulary& vocab, SkipGramConfig config,
                              TrainingTrace* trace) {
  internal::validate(config);
  if (config.negatives < 1) {
    spdlog::warn("word2vec: negatives={} raised to 1", config.negatives);
    config.negatives = 1;
  }
  const int v = static_cast<int>(vocab.size());
  std::mt19937_64 rng(config.seed);
  RowMatrix input(v, config.dim);
  for (Eigen::Index i = 0; i < input.size(); ++i) {
    input.data()[i] = (internal::uniform01(rng) - 0.5) / config.dim;
  }
  input.row(0).setZero();
  RowMatrix output = RowMatrix::Zero(v, config.dim);

  std::vector<std::vector<int>> rows(v);
  for (int w = 0; w < v; ++w) rows[w] = {w};
  internal::run_skipgram(internal::index_sentences(corpus, vocab), vocab, rows,
                         input, output, config, rng, trace);
  input.row(0).setZero();
  return EmbeddingTable{Channel::kWord2Vec, vocab, std::move(input)};
}

}  // namespace cyber

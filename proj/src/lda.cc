#include "cyberevent/lda.h"

#include <cmath>
#include <random>
#include <sstream>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "cyberevent/errors.h"

namespace cyber {
namespace {

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> kWords = {
      "a", "an", "the", "and", "or", "but", "if", "of", "at", "by", "for", "with",
      "about", "to", "from", "in", "on", "into", "over", "as", "is", "are", "was",
      "were", "be", "been", "being", "am", "has", "have", "had", "do", "does",
      "did", "it", "its", "this", "that", "these", "those", "i", "you", "he",
      "she", "we", "they", "me", "him", "her", "us", "them", "my", "your", "his",
      "our", "their", "what", "which", "who", "so", "not", "no", "can", "will",
      "just", "than", "too", "very", "s", "t", "rt", "via", "all", "any", "some",
      "there", "here", "when", "where", "how", "why", "up", "out", "now", "then",
      "get", "got", "would", "could", "should", "may", "might", "must", "more"};
  return kWords;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

bool is_stopword(std::string_view token) {
  return stopwords().count(std::string(token)) > 0;
}

std::vector<int> lda_document(const TokenizedTweet& tweet, const Vocabulary& vocab) {
  std::vector<int> out;
  for (const auto& tok : tweet.tokens) {
    if (is_punctuation(tok) || is_placeholder(tok) || is_stopword(tok)) continue;
    int i = vocab.index(tok);
    if (i > 0) out.push_back(i);
  }
  return out;
}

TopicModel train_lda(const std::vector<TokenizedTweet>& corpus,
                     const Vocabulary& vocab, const LdaConfig& config) {
  std::vector<std::vector<int>> docs;
  docs.reserve(corpus.size());
  for (const auto& t : corpus) docs.push_back(lda_document(t, vocab));
  return train_lda(docs, vocab, config);
}

TopicModel train_lda(const std::vector<std::vector<int>>& documents,
                     const Vocabulary& vocab, const LdaConfig& config) {
  const int k_topics = config.num_topics;
  const int v = static_cast<int>(vocab.size());
  const int words = v - 1;  // real vocabulary entries
  if (documents.empty()) throw DataError("LDA: corpus is empty");
  if (k_topics < 1) throw ConfigError("LDA: num_topics must be >= 1");
  if (k_topics > words) {
    throw ConfigError("LDA: num_topics=" + std::to_string(k_topics) +
                      " exceeds the vocabulary size " + std::to_string(words));
  }
  if (config.passes < 1 || config.sweeps_per_pass < 1) {
    throw ConfigError("LDA: passes and sweeps_per_pass must be >= 1");
  }
  const double alpha = config.alpha > 0 ? config.alpha : 1.0 / k_topics;
  const double beta = config.beta;
  const double vbeta = words * beta;
  const int sweeps = config.passes * config.sweeps_per_pass;

  std::mt19937_64 rng(config.seed);
  const std::size_t n_docs = documents.size();
  Eigen::MatrixXi doc_topic = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(n_docs), k_topics);
  Eigen::MatrixXi topic_word = Eigen::MatrixXi::Zero(k_topics, v);
  Eigen::VectorXi topic_total = Eigen::VectorXi::Zero(k_topics);
  std::vector<std::vector<int>> z(n_docs);
  for (std::size_t d = 0; d < n_docs; ++d) {
    for (int w : documents[d]) {
      if (w <= 0 || w >= v) throw DataError("LDA: word index out of range");
      int k = static_cast<int>(rng() % static_cast<std::uint64_t>(k_topics));
      z[d].push_back(k);
      ++doc_topic(static_cast<Eigen::Index>(d), k);
      ++topic_word(k, w);
      ++topic_total[k];
    }
  }

  auto joint_log_likelihood = [&]() {
    double ll = 0;
    for (int k = 0; k < k_topics; ++k) {
      ll += std::lgamma(vbeta) - words * std::lgamma(beta);
      for (int w = 1; w < v; ++w) ll += std::lgamma(topic_word(k, w) + beta);
      ll -= std::lgamma(topic_total[k] + vbeta);
    }
    const double kalpha = k_topics * alpha;
    for (std::size_t d = 0; d < n_docs; ++d) {
      ll += std::lgamma(kalpha) - k_topics * std::lgamma(alpha);
      for (int k = 0; k < k_topics; ++k) {
        ll += std::lgamma(doc_topic(static_cast<Eigen::Index>(d), k) + alpha);
      }
      ll -= std::lgamma(static_cast<double>(documents[d].size()) + kalpha);
    }
    return ll;
  };

  TopicModel model;
  std::vector<double> p(k_topics);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t d = 0; d < n_docs; ++d) {
      const auto di = static_cast<Eigen::Index>(d);
      for (std::size_t i = 0; i < documents[d].size(); ++i) {
        const int w = documents[d][i];
        int k = z[d][i];
        --doc_topic(di, k);
        --topic_word(k, w);
        --topic_total[k];
        double acc = 0;
        for (int t = 0; t < k_topics; ++t) {
          acc += (doc_topic(di, t) + alpha) * (topic_word(t, w) + beta) /
                 (topic_total[t] + vbeta);
          p[t] = acc;
        }
        const double u = uniform01(rng) * acc;
        k = 0;
        while (k < k_topics - 1 && p[k] <= u) ++k;
        z[d][i] = k;
        ++doc_topic(di, k);
        ++topic_word(k, w);
        ++topic_total[k];
      }
    }
    model.log_likelihood.push_back(joint_log_likelihood());
  }
  spdlog::debug("LDA: log-likelihood {:.3f} -> {:.3f} over {} sweeps",
                model.log_likelihood.front(), model.log_likelihood.back(), sweeps);

  model.num_topics = k_topics;
  model.alpha = alpha;
  model.beta = beta;
  model.inference_iterations = config.inference_iterations;
  model.vocab = vocab;
  model.topic_word = RowMatrix::Zero(k_topics, v);
  for (int k = 0; k < k_topics; ++k) {
    for (int w = 1; w < v; ++w) {
      model.topic_word(k, w) = (topic_word(k, w) + beta) / (topic_total[k] + vbeta);
    }
  }
  model.doc_topic.resize(static_cast<Eigen::Index>(n_docs), k_topics);
  for (std::size_t d = 0; d < n_docs; ++d) {
    const double denom = static_cast<double>(documents[d].size()) + k_topics * alpha;
    for (int k = 0; k < k_topics; ++k) {
      model.doc_topic(static_cast<Eigen::Index>(d), k) =
          (doc_topic(static_cast<Eigen::Index>(d), k) + alpha) / denom;
    }
  }
  return model;
}

Eigen::VectorXd TopicModel::infer(const std::vector<int>& words) const {
  Eigen::VectorXd theta = Eigen::VectorXd::Constant(num_topics, 1.0 / num_topics);
  if (words.empty() || num_topics == 1) return theta;
  const double denom = static_cast<double>(words.size()) + num_topics * alpha;
  Eigen::VectorXd counts(num_topics), r(num_topics);
  for (int it = 0; it < inference_iterations; ++it) {
    counts.setZero();
    for (int w : words) {
      r = theta.cwiseProduct(topic_word.col(w));
      const double s = r.sum();
      if (s > 0) counts += r / s;
    }
    theta = (counts.array() + alpha) / denom;
  }
  return theta;
}

std::string lda_topic_token(const TokenizedTweet& tweet, const TopicModel& model) {
  auto words = lda_document(tweet, model.vocab);
  if (words.empty()) return {};
  Eigen::VectorXd theta = model.infer(words);
  Eigen::Index topic = 0;
  for (Eigen::Index k = 1; k < theta.size(); ++k) {
    if (theta[k] > theta[topic]) topic = k;
  }
  Eigen::Index best = 1;
  for (Eigen::Index w = 2; w < model.topic_word.cols(); ++w) {
    if (model.topic_word(topic, w) > model.topic_word(topic, best)) best = w;
  }
  return model.vocab.token(static_cast<int>(best));
}

Container TopicModel::to_container() const {
  Container c("topic-model");
  std::ostringstream hp;
  hp.precision(17);
  hp << num_topics << ' ' << alpha << ' ' << beta << ' ' << inference_iterations;
  c.put_text("hyperparameters", hp.str());
  c.put_strings("vocab.tokens", vocab.tokens());
  Eigen::VectorXd counts(static_cast<Eigen::Index>(vocab.size()));
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    counts[static_cast<Eigen::Index>(i)] = static_cast<double>(vocab.count(static_cast<int>(i)));
  }
  c.put_vector("vocab.counts", counts);
  c.put_matrix("topic_word", topic_word);
  c.put_matrix("doc_topic", doc_topic);
  c.put_vector("log_likelihood",
               Eigen::Map<const Eigen::VectorXd>(log_likelihood.data(),
                                                 static_cast<Eigen::Index>(log_likelihood.size())));
  return c;
}

TopicModel TopicModel::from_container(const Container& c) {
  TopicModel m;
  std::istringstream hp(c.text("hyperparameters"));
  if (!(hp >> m.num_topics >> m.alpha >> m.beta >> m.inference_iterations)) {
    throw IoError("topic model: bad hyperparameter block");
  }
  Eigen::VectorXd counts = c.vector("vocab.counts");
  std::vector<std::int64_t> cs(counts.size());
  for (Eigen::Index i = 0; i < counts.size(); ++i) cs[i] = static_cast<std::int64_t>(counts[i]);
  m.vocab = Vocabulary::from_entries(c.strings("vocab.tokens"), cs);
  m.topic_word = c.matrix("topic_word");
  m.doc_topic = c.matrix("doc_topic");
  auto ll = c.vector("log_likelihood");
  m.log_likelihood.assign(ll.data(), ll.data() + ll.size());
  return m;
}

}  // namespace cyber

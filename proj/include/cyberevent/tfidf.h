#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Sparse>

#include "cyberevent/data.h"
#include "cyberevent/metrics.h"
#include "cyberevent/text.h"

namespace cyber {

// Unigram + bigram TF-IDF with raw term frequency and idf = log(N / df),
// rows L2-normalized. Terms unseen at fit time are ignored.
class TfidfVectorizer {
 public:
  // Unigrams and "a b" bigrams of one token sequence.
  static std::vector<std::string> terms(const std::vector<std::string>& tokens);

  void fit(const std::vector<std::vector<std::string>>& documents);
  // Unnormalized tf * idf weights keyed by term.
  std::unordered_map<std::string, double> weights(const std::vector<std::string>& tokens) const;
  Eigen::SparseVector<double> transform(const std::vector<std::string>& tokens) const;

  std::size_t size() const { return idf_.size(); }
  double idf(const std::string& term) const;

 private:
  std::unordered_map<std::string, int> index_;
  std::vector<double> idf_;
};

struct LogisticConfig {
  double l2 = 1e-4;
  double learning_rate = 1.0;
  int iterations = 300;
};

// L2-regularized logistic regression by full-batch gradient descent.
class LogisticRegression {
 public:
  void fit(const std::vector<Eigen::SparseVector<double>>& x, const std::vector<double>& y,
           std::size_t features, const LogisticConfig& config);
  double probability(const Eigen::SparseVector<double>& x) const;

 private:
  Eigen::VectorXd w_;
  double b_ = 0;
};

struct BaselineResult {
  MetricsReport metrics;
  std::vector<Prediction> predictions;
};

// Fits on the train split, reports on the test split.
BaselineResult baseline_tfidf_linear(const DatasetSplit& split,
                                     const LogisticConfig& config = LogisticConfig());

}  // namespace cyber

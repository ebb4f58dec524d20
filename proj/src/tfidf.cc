#include "cyberevent/tfidf.h"

#include <cmath>
#include <set>

#include "cyberevent/errors.h"

namespace cyber {

std::vector<std::string> TfidfVectorizer::terms(const std::vector<std::string>& tokens) {
  std::vector<std::string> out(tokens);
  for (std::size_t i = 1; i < tokens.size(); ++i) out.push_back(tokens[i - 1] + " " + tokens[i]);
  return out;
}

void TfidfVectorizer::fit(const std::vector<std::vector<std::string>>& documents) {
  if (documents.empty()) throw DataError("tf-idf: no documents to fit");
  index_.clear();
  std::vector<double> df;
  for (const auto& doc : documents) {
    std::set<std::string> seen;
    for (const auto& t : terms(doc)) {
      if (!seen.insert(t).second) continue;
      auto [it, added] = index_.emplace(t, static_cast<int>(df.size()));
      if (added) df.push_back(0);
      df[static_cast<std::size_t>(it->second)] += 1;
    }
  }
  const double n = static_cast<double>(documents.size());
  idf_.resize(df.size());
  for (std::size_t i = 0; i < df.size(); ++i) idf_[i] = std::log(n / df[i]);
}

double TfidfVectorizer::idf(const std::string& term) const {
  auto it = index_.find(term);
  return it == index_.end() ? 0.0 : idf_[static_cast<std::size_t>(it->second)];
}

std::unordered_map<std::string, double> TfidfVectorizer::weights(
    const std::vector<std::string>& tokens) const {
  std::unordered_map<std::string, double> tf;
  for (const auto& t : terms(tokens)) {
    if (index_.count(t)) tf[t] += 1;
  }
  for (auto& [t, v] : tf) v *= idf(t);
  return tf;
}

Eigen::SparseVector<double> TfidfVectorizer::transform(
    const std::vector<std::string>& tokens) const {
  Eigen::SparseVector<double> v(static_cast<Eigen::Index>(idf_.size()));
  for (const auto& [t, w] : weights(tokens)) {
    if (w != 0) v.coeffRef(index_.at(t)) = w;
  }
  const double norm = v.norm();
  if (norm > 0) v /= norm;
  return v;
}

void LogisticRegression::fit(const std::vector<Eigen::SparseVector<double>>& x,
                             const std::vector<double>& y, std::size_t features,
                             const LogisticConfig& config) {
  const double n = static_cast<double>(x.size());
  w_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(features));
  b_ = 0;
  for (int it = 0; it < config.iterations; ++it) {
    Eigen::VectorXd gw = config.l2 * w_;
    double gb = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = (probability(x[i]) - y[i]) / n;
      for (Eigen::SparseVector<double>::InnerIterator e(x[i]); e; ++e) {
        gw[e.index()] += r * e.value();
      }
      gb += r;
    }
    w_ -= config.learning_rate * gw;
    b_ -= config.learning_rate * gb;
  }
}

double LogisticRegression::probability(const Eigen::SparseVector<double>& x) const {
  double z = b_;
  for (Eigen::SparseVector<double>::InnerIterator e(x); e; ++e) z += w_[e.index()] * e.value();
  return 1.0 / (1.0 + std::exp(-z));
}

BaselineResult baseline_tfidf_linear(const DatasetSplit& split, const LogisticConfig& config) {
  auto tokens_of = [](const RawTweet& t) { return tokenize(normalize(t.text)); };
  std::vector<std::vector<std::string>> docs;
  std::vector<double> y;
  bool has_event = false, has_other = false;
  for (const auto& t : split.train) {
    if (!t.label) throw DataError("tf-idf: training tweet '" + t.id + "' has no label");
    docs.push_back(tokens_of(t));
    y.push_back(*t.label == Label::kEvent ? 1.0 : 0.0);
    (*t.label == Label::kEvent ? has_event : has_other) = true;
  }
  if (!has_event || !has_other) throw DataError("tf-idf: training set must contain both classes");
  TfidfVectorizer vec;
  vec.fit(docs);
  std::vector<Eigen::SparseVector<double>> x;
  for (const auto& d : docs) x.push_back(vec.transform(d));
  LogisticRegression lr;
  lr.fit(x, y, vec.size(), config);

  BaselineResult out;
  for (const auto& t : split.test) {
    const double p = lr.probability(vec.transform(tokens_of(t)));
    out.predictions.push_back({t.id, p > 0.5 ? Label::kEvent : Label::kNonEvent, p});
  }
  out.metrics = evaluate(out.predictions, split.test);
  return out;
}

}  // namespace cyber

#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls the library routine it checks.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Exhaustive enumeration of every tag path of a linear chain.
struct ChainBruteForce {
  std::vector<int> best_path;
  double best_score = -std::numeric_limits<double>::infinity();
  double log_z = -std::numeric_limits<double>::infinity();
};

inline double path_score(const Eigen::MatrixXd& emission, const Eigen::MatrixXd& transition,
                         const Eigen::VectorXd& start, const std::vector<int>& path) {
  double s = start(path[0]) + emission(0, path[0]);
  for (std::size_t t = 1; t < path.size(); ++t) {
    s += transition(path[t - 1], path[t]) + emission(static_cast<Eigen::Index>(t), path[t]);
  }
  return s;
}

inline ChainBruteForce brute_force_chain(const Eigen::MatrixXd& emission,
                                         const Eigen::MatrixXd& transition,
                                         const Eigen::VectorXd& start) {
  const int len = static_cast<int>(emission.rows());
  const int tags = static_cast<int>(emission.cols());
  ChainBruteForce out;
  std::vector<double> scores;
  std::vector<int> path(static_cast<std::size_t>(len), 0);
  long total = 1;
  for (int i = 0; i < len; ++i) total *= tags;
  for (long code = 0; code < total; ++code) {
    long c = code;
    // Most significant digit first so enumeration order is lexicographic.
    for (int t = len - 1; t >= 0; --t) {
      path[static_cast<std::size_t>(t)] = static_cast<int>(c % tags);
      c /= tags;
    }
    const double s = path_score(emission, transition, start, path);
    scores.push_back(s);
    if (s > out.best_score) {
      out.best_score = s;
      out.best_path = path;
    }
  }
  double m = *std::max_element(scores.begin(), scores.end());
  if (std::isfinite(m)) {
    long double acc = 0;
    for (double s : scores) acc += std::exp(static_cast<long double>(s - m));
    out.log_z = m + static_cast<double>(std::log(acc));
  }
  return out;
}

// Plain token frequency count.
inline std::map<std::string, long> count_tokens(
    const std::vector<std::vector<std::string>>& docs) {
  std::map<std::string, long> counts;
  for (const auto& d : docs) {
    for (const auto& t : d) ++counts[t];
  }
  return counts;
}

// Character n-grams of "<word>" by direct code point slicing.
inline std::vector<std::string> code_points(const std::string& s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : 4;
    len = std::min(len, s.size() - i);
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

inline std::vector<std::string> ngrams(const std::string& word, int min_n, int max_n) {
  std::vector<std::string> cps = code_points("<" + word + ">");
  std::vector<std::string> out;
  const int total = static_cast<int>(cps.size());
  for (int n = min_n; n <= max_n; ++n) {
    for (int i = 0; i + n <= total; ++i) {
      if (n == total) continue;  // the whole bracketed word
      std::string g;
      for (int k = i; k < i + n; ++k) g += cps[static_cast<std::size_t>(k)];
      out.push_back(g);
    }
  }
  return out;
}

inline int shared_ngrams(const std::string& a, const std::string& b, int min_n, int max_n) {
  std::vector<std::string> ga = ngrams(a, min_n, max_n);
  std::vector<std::string> gb = ngrams(b, min_n, max_n);
  std::sort(ga.begin(), ga.end());
  ga.erase(std::unique(ga.begin(), ga.end()), ga.end());
  std::sort(gb.begin(), gb.end());
  gb.erase(std::unique(gb.begin(), gb.end()), gb.end());
  std::vector<std::string> both;
  std::set_intersection(ga.begin(), ga.end(), gb.begin(), gb.end(), std::back_inserter(both));
  return static_cast<int>(both.size());
}

// Averages a list of vectors with weight 1 each over `count` = N + M + 1.
inline Eigen::VectorXd average_with_denominator(const std::vector<Eigen::VectorXd>& parts,
                                                Eigen::Index dim, std::size_t count) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
  for (const auto& p : parts) {
    for (Eigen::Index i = 0; i < dim; ++i) acc(i) += p(i);
  }
  for (Eigen::Index i = 0; i < dim; ++i) acc(i) /= static_cast<double>(count);
  return acc;
}

// Purity of a hard clustering against gold classes.
inline double purity(const std::vector<int>& cluster, const std::vector<int>& gold) {
  std::map<int, std::map<int, int>> table;
  for (std::size_t i = 0; i < cluster.size(); ++i) ++table[cluster[i]][gold[i]];
  long hit = 0;
  for (const auto& [c, row] : table) {
    int best = 0;
    for (const auto& [g, n] : row) best = std::max(best, n);
    hit += best;
  }
  return cluster.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(cluster.size());
}

// Whole-word phrase scan: lowercase, split on anything that is not a letter
// or digit, look for the phrase words as a contiguous run.
inline std::vector<std::string> words_of(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline bool contains_phrase(const std::string& text, const std::string& phrase) {
  const std::vector<std::string> w = words_of(text);
  const std::vector<std::string> p = words_of(phrase);
  if (p.empty() || p.size() > w.size()) return false;
  for (std::size_t i = 0; i + p.size() <= w.size(); ++i) {
    bool ok = true;
    for (std::size_t k = 0; k < p.size() && ok; ++k) ok = w[i + k] == p[k];
    if (ok) return true;
  }
  return false;
}

// Binary confusion counts, event (0) as positive.
struct Counts {
  long tp = 0, fp = 0, tn = 0, fn = 0;
};

inline Counts count_pairs(const std::vector<int>& pred, const std::vector<int>& gold) {
  Counts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == 0 && gold[i] == 0) ++c.tp;
    if (pred[i] == 0 && gold[i] == 1) ++c.fp;
    if (pred[i] == 1 && gold[i] == 1) ++c.tn;
    if (pred[i] == 1 && gold[i] == 0) ++c.fn;
  }
  return c;
}

}  // namespace oracle

#include "cyberevent/crf.h"

#include <cmath>
#include <limits>

#include "cyberevent/errors.h"

namespace cyber {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check(const ChainScores& s) {
  if (s.transition.rows() != s.tags() || s.transition.cols() != s.tags() ||
      s.start.size() != s.tags() || s.length() == 0) {
    throw ShapeError("chain CRF: inconsistent score shapes");
  }
}

// alpha(t, j) = log sum over paths ending in j at t.
Eigen::MatrixXd forward(const ChainScores& s) {
  const Eigen::Index len = s.length(), n = s.tags();
  Eigen::MatrixXd a(len, n);
  a.row(0) = (s.start + s.emission.row(0).transpose()).transpose();
  Eigen::VectorXd tmp(n);
  for (Eigen::Index t = 1; t < len; ++t) {
    for (Eigen::Index j = 0; j < n; ++j) {
      tmp = a.row(t - 1).transpose() + s.transition.col(j);
      a(t, j) = log_sum_exp(tmp) + s.emission(t, j);
    }
  }
  return a;
}

Eigen::MatrixXd backward(const ChainScores& s) {
  const Eigen::Index len = s.length(), n = s.tags();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(len, n);
  Eigen::VectorXd tmp(n);
  for (Eigen::Index t = len - 2; t >= 0; --t) {
    for (Eigen::Index i = 0; i < n; ++i) {
      tmp = s.transition.row(i).transpose() + s.emission.row(t + 1).transpose() +
            b.row(t + 1).transpose();
      b(t, i) = log_sum_exp(tmp);
    }
  }
  return b;
}

}  // namespace

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double m = v.maxCoeff();
  if (m == kNegInf) return kNegInf;
  return m + std::log((v.array() - m).exp().sum());
}

double sequence_score(const ChainScores& s, const std::vector<int>& tags) {
  check(s);
  if (static_cast<Eigen::Index>(tags.size()) != s.length()) {
    throw ShapeError("chain CRF: tag sequence length mismatch");
  }
  double score = s.start[tags[0]] + s.emission(0, tags[0]);
  for (Eigen::Index t = 1; t < s.length(); ++t) {
    score += s.transition(tags[t - 1], tags[t]) + s.emission(t, tags[t]);
  }
  return score;
}

double log_partition(const ChainScores& s) {
  check(s);
  Eigen::MatrixXd a = forward(s);
  return log_sum_exp(a.row(s.length() - 1).transpose());
}

std::vector<int> viterbi(const ChainScores& s) {
  check(s);
  const Eigen::Index len = s.length(), n = s.tags();
  Eigen::MatrixXd best(len, n);
  Eigen::MatrixXi back = Eigen::MatrixXi::Zero(len, n);
  best.row(0) = (s.start + s.emission.row(0).transpose()).transpose();
  for (Eigen::Index t = 1; t < len; ++t) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double top = kNegInf;
      int arg = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        double v = best(t - 1, i) + s.transition(i, j);
        if (v > top) {
          top = v;
          arg = static_cast<int>(i);
        }
      }
      best(t, j) = top + s.emission(t, j);
      back(t, j) = arg;
    }
  }
  std::vector<int> path(len);
  Eigen::Index last = 0;
  for (Eigen::Index j = 1; j < n; ++j) {
    if (best(len - 1, j) > best(len - 1, last)) last = j;
  }
  path[len - 1] = static_cast<int>(last);
  for (Eigen::Index t = len - 1; t > 0; --t) path[t - 1] = back(t, path[t]);
  return path;
}

ChainMarginals chain_marginals(const ChainScores& s) {
  check(s);
  const Eigen::Index len = s.length(), n = s.tags();
  Eigen::MatrixXd a = forward(s);
  Eigen::MatrixXd b = backward(s);
  ChainMarginals m;
  m.log_z = log_sum_exp(a.row(len - 1).transpose());
  m.node = (a + b).array() - m.log_z;
  m.node = m.node.array().exp();
  m.transition = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index t = 1; t < len; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        double lp = a(t - 1, i) + s.transition(i, j) + s.emission(t, j) + b(t, j) - m.log_z;
        if (lp != kNegInf) m.transition(i, j) += std::exp(lp);
      }
    }
  }
  return m;
}

}  // namespace cyber

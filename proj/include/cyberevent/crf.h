#pragma once

// Linear-chain CRF inference over dense log-space scores. Forbidden
// transitions are expressed as -infinity entries.

#include <vector>

#include <Eigen/Dense>

namespace cyber {

struct ChainScores {
  Eigen::MatrixXd emission;    // L x T
  Eigen::MatrixXd transition;  // T x T, row = previous tag, column = next tag
  Eigen::VectorXd start;       // T

  Eigen::Index length() const { return emission.rows(); }
  Eigen::Index tags() const { return emission.cols(); }
};

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v);

double sequence_score(const ChainScores& s, const std::vector<int>& tags);

// Forward algorithm. Returns log Z; -inf when no path is allowed.
double log_partition(const ChainScores& s);

// Highest scoring tag path (ties broken toward the lower tag index).
std::vector<int> viterbi(const ChainScores& s);

struct ChainMarginals {
  double log_z = 0;
  Eigen::MatrixXd node;        // L x T, P(y_t = j)
  Eigen::MatrixXd transition;  // T x T, sum over t of P(y_{t-1} = i, y_t = j)
};

// Forward-backward posterior marginals.
ChainMarginals chain_marginals(const ChainScores& s);

}  // namespace cyber

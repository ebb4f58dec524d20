#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cyberevent/nn.h"

namespace cyber {

struct GradcheckEntry {
  std::string component;
  std::string parameter;
  int checked = 0;
  double max_relative_error = 0;
  Eigen::Index worst_row = 0, worst_col = 0;
  double tolerance = 1e-4;
  bool passed() const { return max_relative_error < tolerance; }
};

struct GradcheckReport {
  std::vector<GradcheckEntry> entries;
  bool passed() const;
  void append(const GradcheckReport& other);
  // One line per parameter tensor; failures name the worst index.
  std::string to_text() const;
};

// |analytic - numeric| / max(|analytic|, |numeric|, 1e-6).
double relative_error(double analytic, double numeric);

// Central differences on `samples` random entries of every parameter.
// `loss(true)` must zero and fill the parameter grads; `loss(false)` only
// evaluates.
GradcheckReport check_gradients(const std::string& component, const ParamList& params,
                                const std::function<double(bool)>& loss, int samples,
                                std::uint64_t seed, double tolerance, double eps = 1e-5);

// Component checks at the production sizes, 64-bit throughout.
GradcheckReport gradcheck_cnn(std::uint64_t seed = 1, int samples = 20);
GradcheckReport gradcheck_lstm(std::uint64_t seed = 1, int samples = 20, int steps = 7);
GradcheckReport gradcheck_meta(std::uint64_t seed = 1, int samples = 20);
GradcheckReport gradcheck_crf(std::uint64_t seed = 1, int samples = 20);
// Linear + softmax + cross-entropy head, checked at 1e-6.
GradcheckReport gradcheck_fusion(std::uint64_t seed = 1, int samples = 20);
GradcheckReport gradcheck_all(std::uint64_t seed = 1, int samples = 20);

}  // namespace cyber

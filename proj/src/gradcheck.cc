#include "cyberevent/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "cyberevent/meta.h"
#include "cyberevent/model.h"
#include "cyberevent/ner.h"

namespace cyber {
namespace {

RowMatrix random_rows(Eigen::Index rows, Eigen::Index cols, std::size_t real,
                      std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 0.5);
  RowMatrix m = RowMatrix::Zero(rows, cols);
  for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(real); ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = g(rng);
  }
  return m;
}

std::vector<EncodedTweet> random_tweets(const ClassifierConfig& config,
                                        const std::vector<std::size_t>& lengths,
                                        std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 0.5);
  std::vector<EncodedTweet> out;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    EncodedTweet t;
    t.id = "g" + std::to_string(i);
    const auto lmax = static_cast<Eigen::Index>(std::max<std::size_t>(lengths[i] + 2, 8));
    t.sequence = random_rows(lmax, config.dim, lengths[i], rng);
    t.length = lengths[i];
    t.context = Eigen::VectorXd::NullaryExpr(config.dim, [&] { return g(rng); });
    t.label = i % 2 == 0 ? Label::kEvent : Label::kNonEvent;
    out.push_back(std::move(t));
  }
  return out;
}

GradcheckReport classifier_check(const std::string& component, std::uint64_t seed,
                                 int samples, const std::vector<std::size_t>& lengths,
                                 ParamList (*select)(FusedClassifier&), double tolerance) {
  ClassifierConfig config;
  config.seed = seed;
  FusedClassifier model(config);
  std::mt19937_64 rng(seed);
  auto tweets = random_tweets(config, lengths, rng);
  std::vector<const EncodedTweet*> batch;
  for (const auto& t : tweets) batch.push_back(&t);
  ParamList all = model.parameters();
  auto loss = [&](bool grad) {
    if (grad) zero_grads(all);
    return model.loss(batch, grad);
  };
  return check_gradients(component, select(model), loss, samples, seed, tolerance);
}

}  // namespace

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / denom;
}

bool GradcheckReport::passed() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const GradcheckEntry& e) { return e.passed(); });
}

void GradcheckReport::append(const GradcheckReport& other) {
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

std::string GradcheckReport::to_text() const {
  std::ostringstream out;
  for (const auto& e : entries) {
    out << fmt::format("{:<8} {:<24} checked {:>3}  max rel. error {:.3e}  {}", e.component,
                       e.parameter, e.checked, e.max_relative_error,
                       e.passed() ? "ok" : "FAIL");
    if (!e.passed()) out << fmt::format(" at ({}, {})", e.worst_row, e.worst_col);
    out << '\n';
  }
  return out.str();
}

GradcheckReport check_gradients(const std::string& component, const ParamList& params,
                                const std::function<double(bool)>& loss, int samples,
                                std::uint64_t seed, double tolerance, double eps) {
  loss(true);
  std::vector<Eigen::MatrixXd> analytic;
  for (const Param* p : params) analytic.push_back(p->grad);
  std::mt19937_64 rng(seed);
  GradcheckReport report;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Param& p = *params[k];
    GradcheckEntry entry;
    entry.component = component;
    entry.parameter = p.name;
    entry.tolerance = tolerance;
    const Eigen::Index size = p.value.size();
    const int n = static_cast<int>(std::min<Eigen::Index>(samples, size));
    std::uniform_int_distribution<Eigen::Index> pick(0, size - 1);
    for (int s = 0; s < n; ++s) {
      const Eigen::Index flat = size <= samples ? s : pick(rng);
      const Eigen::Index r = flat % p.value.rows(), c = flat / p.value.rows();
      const double saved = p.value(r, c);
      p.value(r, c) = saved + eps;
      const double up = loss(false);
      p.value(r, c) = saved - eps;
      const double down = loss(false);
      p.value(r, c) = saved;
      const double err = relative_error(analytic[k](r, c), (up - down) / (2 * eps));
      ++entry.checked;
      if (s == 0 || err > entry.max_relative_error) {
        entry.max_relative_error = err;
        entry.worst_row = r;
        entry.worst_col = c;
      }
    }
    report.entries.push_back(entry);
  }
  return report;
}

GradcheckReport gradcheck_cnn(std::uint64_t seed, int samples) {
  // Lengths 3 and 9 cover the short-tweet window and ordinary pooling.
  return classifier_check("cnn", seed, samples, {9, 3},
                          [](FusedClassifier& m) { return m.cnn_parameters(); }, 1e-4);
}

GradcheckReport gradcheck_lstm(std::uint64_t seed, int samples, int steps) {
  return classifier_check("lstm", seed, samples, {static_cast<std::size_t>(steps)},
                          [](FusedClassifier& m) { return m.lstm_parameters(); }, 1e-4);
}

GradcheckReport gradcheck_fusion(std::uint64_t seed, int samples) {
  return classifier_check("fusion", seed, samples, {6, 4},
                          [](FusedClassifier& m) { return m.head_parameters(); }, 1e-6);
}

GradcheckReport gradcheck_meta(std::uint64_t seed, int samples) {
  MetaEncoder enc(100, 32, 3, seed);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(3, 100 * 3, [&] { return g(rng); });
  ParamList params = enc.parameters();
  auto loss = [&](bool grad) {
    if (grad) zero_grads(params);
    return enc.loss(x, grad);
  };
  return check_gradients("meta", params, loss, samples, seed, 1e-4);
}

GradcheckReport gradcheck_crf(std::uint64_t seed, int samples) {
  const std::vector<std::string> words{"ransomware", "hit", "the", "hospital", "zero",
                                       "day", "exploit", "in", "chrome", "<url>"};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> word(0, words.size() - 1);
  std::uniform_int_distribution<int> tag(0, kNumBioTags - 1);
  std::vector<NerSequence> data;
  for (int i = 0; i < 8; ++i) {
    NerSequence s;
    int prev = kOutside;
    for (int t = 0; t < 5; ++t) {
      int y = tag(rng);
      if (y == kInside && prev == kOutside) y = kBegin;
      s.tokens.push_back(words[word(rng)]);
      s.tags.push_back(y);
      prev = y;
    }
    data.push_back(std::move(s));
  }
  CrfConfig config;
  config.epochs = 2;
  config.seed = seed;
  NerModel model = train_crf_ner(data, config);
  ParamList params = model.parameters();
  auto loss = [&](bool grad) {
    if (grad) {
      zero_grads(params);
      return model.accumulate_negative_objective_gradient(data, config.l2);
    }
    return -model.objective(data, config.l2);
  };
  return check_gradients("crf", params, loss, samples, seed, 1e-4);
}

GradcheckReport gradcheck_all(std::uint64_t seed, int samples) {
  GradcheckReport r = gradcheck_cnn(seed, samples);
  r.append(gradcheck_lstm(seed, samples));
  r.append(gradcheck_meta(seed, samples));
  r.append(gradcheck_crf(seed, samples));
  r.append(gradcheck_fusion(seed, samples));
  return r;
}

}  // namespace cyber

#include "cyberevent/ablation.h"

#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "cyberevent/errors.h"
#include "cyberevent/nn.h"

namespace cyber {
namespace {

struct Features {
  Eigen::MatrixXd x;  // D x n
  std::vector<int> y;
  std::vector<std::string> ids;
};

Features contextual_features(const std::vector<RawTweet>& tweets, const Upstream& up,
                             const AblationSpec& spec) {
  Features f;
  f.x.resize(up.featurizer->dim(), static_cast<Eigen::Index>(tweets.size()));
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    if (!tweets[i].label) throw DataError("ablation: tweet '" + tweets[i].id + "' has no label");
    TokenizedTweet t = tokenize_tweet(tweets[i].id, tweets[i].text);
    f.x.col(static_cast<Eigen::Index>(i)) =
        contextual_encode(t, up.context, *up.featurizer, spec).vector;
    f.y.push_back(static_cast<int>(*tweets[i].label));
    f.ids.push_back(tweets[i].id);
  }
  return f;
}

class MlpHead {
 public:
  MlpHead(int in, int hidden, std::uint64_t seed)
      : hidden_("ablation.hidden", in, hidden), out_("ablation.out", hidden, 2) {
    std::mt19937_64 rng(seed);
    hidden_.init(rng);
    out_.init(rng);
  }

  Eigen::MatrixXd probabilities(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd logits = out_.forward(hidden_.forward(x).cwiseMax(0.0));
    Eigen::MatrixXd p(2, x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) p.col(c) = softmax(logits.col(c));
    return p;
  }

  void step_gradient(const Eigen::MatrixXd& x, const std::vector<int>& y) {
    Eigen::MatrixXd pre = hidden_.forward(x);
    Eigen::MatrixXd h = pre.cwiseMax(0.0);
    Eigen::MatrixXd logits = out_.forward(h);
    Eigen::MatrixXd d(2, x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      d.col(c) = softmax(logits.col(c));
      d(y[static_cast<std::size_t>(c)], c) -= 1.0;
    }
    d /= static_cast<double>(x.cols());
    Eigen::MatrixXd dh = out_.backward(d, h, true);
    dh = dh.cwiseProduct((pre.array() > 0).cast<double>().matrix());
    hidden_.backward(dh, x, false);
  }

  ParamList parameters() {
    ParamList p = hidden_.parameters();
    for (Param* q : out_.parameters()) p.push_back(q);
    return p;
  }

 private:
  Dense hidden_, out_;
};

double accuracy_of(const Eigen::MatrixXd& p, const std::vector<int>& y) {
  long correct = 0;
  for (Eigen::Index c = 0; c < p.cols(); ++c) {
    const int pred = p(0, c) > p(1, c) ? 0 : 1;
    correct += pred == y[static_cast<std::size_t>(c)];
  }
  return p.cols() ? static_cast<double>(correct) / static_cast<double>(p.cols()) : 0.0;
}

}  // namespace

std::vector<AblationSpec> standard_ablation_specs() {
  return {{true, true, true},  {true, true, false}, {true, false, true}, {false, true, true},
          {false, false, true}, {false, true, false}, {true, false, false}};
}

double AblationRow::mean_accuracy() const {
  if (accuracy.empty()) return 0.0;
  return std::accumulate(accuracy.begin(), accuracy.end(), 0.0) /
         static_cast<double>(accuracy.size());
}

double AblationRow::stddev_accuracy() const {
  if (accuracy.size() < 2) return 0.0;
  const double m = mean_accuracy();
  double s = 0;
  for (double a : accuracy) s += (a - m) * (a - m);
  return std::sqrt(s / static_cast<double>(accuracy.size() - 1));
}

std::string AblationTable::to_text() const {
  std::string out = fmt::format("{:<10} {:>9} {:>8}  per-seed accuracy\n", "Features",
                                "Accuracy", "Std");
  for (const auto& r : rows) {
    std::string seeds;
    for (double a : r.accuracy) seeds += fmt::format(" {:.4f}", a);
    out += fmt::format("{:<10} {:>9.4f} {:>8.4f} {}\n", r.name, r.mean_accuracy(),
                       r.stddev_accuracy(), seeds);
  }
  return out;
}

std::string AblationTable::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json row;
    row["features"] = r.name;
    row["lda"] = r.spec.lda;
    row["ner"] = r.spec.ner;
    row["ie"] = r.spec.ie;
    row["mean_accuracy"] = r.mean_accuracy();
    row["stddev_accuracy"] = r.stddev_accuracy();
    row["seeds"] = r.seeds;
    row["accuracy"] = r.accuracy;
    j.push_back(row);
  }
  return j.dump(2);
}

AblationTable run_ablation(const DatasetSplit& split, const Upstream& upstream,
                           const std::vector<AblationSpec>& specs,
                           const std::vector<std::uint64_t>& seeds,
                           const AblationHeadConfig& head) {
  if (split.train.empty() || split.validation.empty() || split.test.empty()) {
    throw DataError("ablation: train, validation and test splits must be nonempty");
  }
  AblationTable table;
  for (const auto& spec : specs) {
    Features train = contextual_features(split.train, upstream, spec);
    Features val = contextual_features(split.validation, upstream, spec);
    Features test = contextual_features(split.test, upstream, spec);
    // Standardize with training statistics; constant features stay zero.
    Eigen::VectorXd mean = train.x.rowwise().mean();
    Eigen::VectorXd sd =
        ((train.x.colwise() - mean).array().square().rowwise().mean()).sqrt().matrix();
    for (Eigen::Index i = 0; i < sd.size(); ++i) sd[i] = sd[i] > 1e-12 ? 1.0 / sd[i] : 0.0;
    for (Features* f : {&train, &val, &test}) {
      f->x = (f->x.colwise() - mean).array().colwise() * sd.array();
    }

    AblationRow row;
    row.name = spec.name();
    row.spec = spec;
    for (std::uint64_t seed : seeds) {
      MlpHead mlp(static_cast<int>(train.x.rows()), head.hidden, seed);
      ParamList params = mlp.parameters();
      Adam adam(params, AdamConfig{head.learning_rate});
      std::mt19937_64 rng(seed);
      std::vector<Eigen::Index> order(static_cast<std::size_t>(train.x.cols()));
      std::iota(order.begin(), order.end(), 0);
      std::vector<Eigen::MatrixXd> best;
      double best_acc = -1;
      for (int epoch = 0; epoch < head.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(head.batch_size)) {
          const std::size_t e = std::min(order.size(), b + static_cast<std::size_t>(head.batch_size));
          Eigen::MatrixXd xb(train.x.rows(), static_cast<Eigen::Index>(e - b));
          std::vector<int> yb;
          for (std::size_t i = b; i < e; ++i) {
            xb.col(static_cast<Eigen::Index>(i - b)) = train.x.col(order[i]);
            yb.push_back(train.y[static_cast<std::size_t>(order[i])]);
          }
          zero_grads(params);
          mlp.step_gradient(xb, yb);
          adam.step();
        }
        const double acc = accuracy_of(mlp.probabilities(val.x), val.y);
        if (acc > best_acc) {
          best_acc = acc;
          best.clear();
          for (const Param* p : params) best.push_back(p->value);
        }
      }
      for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best[i];
      Eigen::MatrixXd p = mlp.probabilities(test.x);
      std::vector<Label> pred, gold;
      for (Eigen::Index c = 0; c < p.cols(); ++c) {
        pred.push_back(p(0, c) > p(1, c) ? Label::kEvent : Label::kNonEvent);
        gold.push_back(static_cast<Label>(test.y[static_cast<std::size_t>(c)]));
      }
      MetricsReport m = compute_metrics(pred, gold);
      row.seeds.push_back(seed);
      row.accuracy.push_back(m.accuracy);
      row.reports.push_back(m);
    }
    spdlog::info("ablation {:<8} mean accuracy {:.4f}", row.name, row.mean_accuracy());
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace cyber

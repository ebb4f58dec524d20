#include "cyberevent/model.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "cyberevent/errors.h"

namespace cyber {

struct FusedClassifier::Cache {
  std::vector<Conv1d::Cache> conv;
  std::vector<Eigen::MatrixXd> activation;  // F x positions, after ReLU
  std::vector<std::vector<Eigen::Index>> argmax;
  Lstm::Cache forward, backward;
  Eigen::VectorXd fused;
};

FusedClassifier::FusedClassifier(const ClassifierConfig& config) : config_(config) {
  if (config.dim <= 0 || config.filters <= 0 || config.hidden <= 0 ||
      config.widths.empty() || config.dropout < 0 || config.dropout >= 1) {
    throw ConfigError("classifier: invalid architecture configuration");
  }
  std::mt19937_64 rng(config.seed);
  for (int w : config.widths) {
    if (w <= 0) throw ConfigError("classifier: filter widths must be positive");
    convs_.emplace_back("cnn.w" + std::to_string(w), config.dim, config.filters, w, false);
    convs_.back().init(rng);
  }
  forward_lstm_ = Lstm("lstm.forward", config.dim, config.hidden);
  backward_lstm_ = Lstm("lstm.backward", config.dim, config.hidden);
  forward_lstm_.init(rng);
  backward_lstm_.init(rng);
  head_ = Dense("fusion", fused_size(), 2);
  head_.init(rng);
}

Eigen::VectorXd FusedClassifier::cnn_forward(const RowMatrix& sequence, std::size_t length,
                                             Cache* cache) const {
  const int widest = *std::max_element(config_.widths.begin(), config_.widths.end());
  if (sequence.rows() < widest) {
    throw ShapeError("cnn branch: L_max " + std::to_string(sequence.rows()) +
                     " is shorter than filter width " + std::to_string(widest));
  }
  if (sequence.cols() != config_.dim || length > static_cast<std::size_t>(sequence.rows())) {
    throw ShapeError("cnn branch: expected L_max x " + std::to_string(config_.dim) +
                     " input with length <= L_max");
  }
  const auto n = static_cast<Eigen::Index>(length);
  Eigen::VectorXd out(cnn_size());
  if (cache) {
    cache->conv.assign(convs_.size(), {});
    cache->activation.assign(convs_.size(), {});
    cache->argmax.assign(convs_.size(), {});
  }
  for (std::size_t k = 0; k < convs_.size(); ++k) {
    const Eigen::Index w = convs_[k].kernel();
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(config_.dim, std::max(n, w));
    x.leftCols(n) = sequence.topRows(n).transpose();
    Conv1d::Cache cc;
    Eigen::MatrixXd a = convs_[k].forward(x, x.cols(), cache ? &cc : nullptr).cwiseMax(0.0);
    std::vector<Eigen::Index> arg(static_cast<std::size_t>(config_.filters));
    for (int f = 0; f < config_.filters; ++f) {
      Eigen::Index best = 0;
      out[static_cast<Eigen::Index>(k) * config_.filters + f] = a.row(f).maxCoeff(&best);
      arg[static_cast<std::size_t>(f)] = best;
    }
    if (cache) {
      cache->conv[k] = std::move(cc);
      cache->activation[k] = std::move(a);
      cache->argmax[k] = std::move(arg);
    }
  }
  return out;
}

Eigen::VectorXd FusedClassifier::bilstm_forward(const RowMatrix& sequence, std::size_t length,
                                                Cache* cache) const {
  if (length == 0) throw DegenerateInputError("bilstm branch: tweet has no tokens");
  if (sequence.cols() != config_.dim || length > static_cast<std::size_t>(sequence.rows())) {
    throw ShapeError("bilstm branch: expected L_max x " + std::to_string(config_.dim) +
                     " input with length <= L_max");
  }
  const auto n = static_cast<Eigen::Index>(length);
  Eigen::MatrixXd x = sequence.topRows(n).transpose();
  Eigen::MatrixXd reversed = x.rowwise().reverse();
  Eigen::VectorXd out(bilstm_size());
  out.head(config_.hidden) = forward_lstm_.forward(x, cache ? &cache->forward : nullptr);
  out.tail(config_.hidden) =
      backward_lstm_.forward(reversed, cache ? &cache->backward : nullptr);
  return out;
}

Eigen::VectorXd FusedClassifier::fused_input(const EncodedTweet& tweet, Cache* cache) const {
  if (tweet.context.size() != config_.dim) {
    throw ShapeError("contextual branch: expected " + std::to_string(config_.dim) +
                     " values, got " + std::to_string(tweet.context.size()));
  }
  Eigen::VectorXd z(fused_size());
  z.head(cnn_size()) = cnn_forward(tweet.sequence, tweet.length, cache);
  z.segment(cnn_size(), bilstm_size()) = bilstm_forward(tweet.sequence, tweet.length, cache);
  z.tail(config_.dim) = tweet.context;
  if (cache) cache->fused = z;
  return z;
}

Eigen::VectorXd FusedClassifier::logits(const EncodedTweet& tweet) const {
  return head_.forward(fused_input(tweet)).col(0);
}

Eigen::VectorXd FusedClassifier::probabilities(const EncodedTweet& tweet) const {
  return softmax(logits(tweet));
}

double FusedClassifier::loss(const std::vector<const EncodedTweet*>& batch,
                             bool accumulate_gradient, std::mt19937_64* dropout_rng,
                             const Eigen::Vector2d& class_weight) {
  if (batch.empty()) return 0.0;
  const double scale = 1.0 / static_cast<double>(batch.size());
  const double keep = 1.0 - config_.dropout;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double total = 0;
  for (const EncodedTweet* t : batch) {
    if (!t->label) throw DataError("classifier: tweet '" + t->id + "' has no label");
    const int y = static_cast<int>(*t->label);
    Cache cache;
    Eigen::VectorXd z = fused_input(*t, accumulate_gradient ? &cache : nullptr);
    Eigen::VectorXd mask = Eigen::VectorXd::Ones(z.size());
    if (dropout_rng && config_.dropout > 0) {
      for (Eigen::Index i = 0; i < mask.size(); ++i) {
        mask[i] = unit(*dropout_rng) < keep ? 1.0 / keep : 0.0;
      }
      z = z.cwiseProduct(mask);
    }
    Eigen::VectorXd p = softmax(head_.forward(z).col(0));
    total += -class_weight[y] * std::log(std::max(p[y], 1e-300));
    if (!accumulate_gradient) continue;

    Eigen::VectorXd dlogit = p;
    dlogit[y] -= 1.0;
    dlogit *= class_weight[y] * scale;
    Eigen::VectorXd dz = head_.backward(dlogit, z, true).col(0).cwiseProduct(mask);

    for (std::size_t k = 0; k < convs_.size(); ++k) {
      const Eigen::MatrixXd& a = cache.activation[k];
      Eigen::MatrixXd dout = Eigen::MatrixXd::Zero(a.rows(), a.cols());
      for (int f = 0; f < config_.filters; ++f) {
        const Eigen::Index pos = cache.argmax[k][static_cast<std::size_t>(f)];
        if (a(f, pos) > 0) dout(f, pos) = dz[static_cast<Eigen::Index>(k) * config_.filters + f];
      }
      convs_[k].backward(dout, cache.conv[k], false);
    }
    forward_lstm_.backward(dz.segment(cnn_size(), config_.hidden), cache.forward);
    backward_lstm_.backward(dz.segment(cnn_size() + config_.hidden, config_.hidden),
                            cache.backward);
  }
  return total * scale;
}

ParamList FusedClassifier::cnn_parameters() {
  ParamList out;
  for (auto& c : convs_) {
    for (Param* p : c.parameters()) out.push_back(p);
  }
  return out;
}

ParamList FusedClassifier::lstm_parameters() {
  ParamList out = forward_lstm_.parameters();
  for (Param* p : backward_lstm_.parameters()) out.push_back(p);
  return out;
}

ParamList FusedClassifier::parameters() {
  ParamList out = cnn_parameters();
  for (Param* p : lstm_parameters()) out.push_back(p);
  for (Param* p : head_.parameters()) out.push_back(p);
  return out;
}

namespace {

nlohmann::ordered_json config_json(const ClassifierConfig& c) {
  nlohmann::ordered_json j;
  j["dim"] = c.dim;
  j["filters"] = c.filters;
  j["widths"] = c.widths;
  j["hidden"] = c.hidden;
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["dropout"] = c.dropout;
  j["class_weights"] = c.class_weights;
  j["seed"] = c.seed;
  return j;
}

ClassifierConfig config_from_json(const nlohmann::json& j) {
  ClassifierConfig c;
  c.dim = j.at("dim");
  c.filters = j.at("filters");
  c.widths = j.at("widths").get<std::vector<int>>();
  c.hidden = j.at("hidden");
  c.learning_rate = j.at("learning_rate");
  c.epochs = j.at("epochs");
  c.batch_size = j.at("batch_size");
  c.dropout = j.at("dropout");
  c.class_weights = j.at("class_weights");
  c.seed = j.at("seed");
  return c;
}

}  // namespace

void FusedClassifier::write(Container& c) const {
  c.put_text("classifier.config", config_json(config_).dump());
  write_params(c, const_cast<FusedClassifier*>(this)->parameters());
}

void FusedClassifier::read(const Container& c) {
  *this = FusedClassifier(config_from_json(nlohmann::json::parse(c.text("classifier.config"))));
  read_params(c, parameters());
}

Container TrainState::to_container() const {
  Container c("classifier");
  model.write(c);
  RowMatrix h(static_cast<Eigen::Index>(history.size()), 4);
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    h(r, 0) = history[i].epoch;
    h(r, 1) = history[i].train_loss;
    h(r, 2) = history[i].validation_accuracy;
    h(r, 3) = history[i].validation_f1;
  }
  c.put_matrix("history", h);
  Eigen::VectorXd s(2);
  s << best_epoch, static_cast<double>(max_length);
  c.put_vector("state", s);
  return c;
}

TrainState TrainState::from_container(const Container& c) {
  if (c.kind() != "classifier") throw DataError("not a classifier artifact: " + c.kind());
  TrainState st;
  st.model.read(c);
  const RowMatrix& h = c.matrix("history");
  for (Eigen::Index r = 0; r < h.rows(); ++r) {
    st.history.push_back({static_cast<int>(h(r, 0)), h(r, 1), h(r, 2), h(r, 3)});
  }
  Eigen::VectorXd s = c.vector("state");
  st.best_epoch = static_cast<int>(s[0]);
  st.max_length = static_cast<std::size_t>(s[1]);
  return st;
}

TrainState TrainState::load(const std::string& path) {
  return from_container(Container::load(path, "classifier"));
}

Label predicted_label(const Eigen::VectorXd& p) {
  return p[0] > p[1] ? Label::kEvent : Label::kNonEvent;
}

std::vector<Prediction> predict_encoded(const FusedClassifier& model,
                                        const std::vector<EncodedTweet>& tweets) {
  std::vector<Prediction> out;
  out.reserve(tweets.size());
  for (const auto& t : tweets) {
    if (t.length == 0) {
      spdlog::warn("tweet '{}' has no tokens; predicting non_event", t.id);
      out.push_back({t.id, Label::kNonEvent, 0.0});
      continue;
    }
    Eigen::VectorXd p = model.probabilities(t);
    out.push_back({t.id, predicted_label(p), p[0]});
  }
  return out;
}

TrainState train_classifier(const std::vector<EncodedTweet>& train,
                            const std::vector<EncodedTweet>& validation,
                            const ClassifierConfig& config) {
  if (train.empty() || validation.empty()) {
    throw DataError("classifier: training and validation sets must be nonempty");
  }
  if (config.epochs <= 0 || config.batch_size <= 0 || config.learning_rate <= 0) {
    throw ConfigError("classifier: epochs, batch size and learning rate must be positive");
  }
  std::vector<const EncodedTweet*> usable;
  std::array<long, 2> class_count{0, 0};
  for (const auto& t : train) {
    if (!t.label) throw DataError("classifier: training tweet '" + t.id + "' has no label");
    if (t.length == 0) continue;
    ++class_count[static_cast<std::size_t>(*t.label)];
    usable.push_back(&t);
  }
  if (class_count[0] == 0 || class_count[1] == 0) {
    throw DataError("classifier: training set must contain both classes");
  }
  std::vector<Label> gold;
  for (const auto& t : validation) {
    if (!t.label) throw DataError("classifier: validation tweet '" + t.id + "' has no label");
    gold.push_back(*t.label);
  }
  Eigen::Vector2d weight = Eigen::Vector2d::Ones();
  if (config.class_weights) {
    const double n = static_cast<double>(usable.size());
    weight << n / (2.0 * static_cast<double>(class_count[0])),
        n / (2.0 * static_cast<double>(class_count[1]));
  }

  TrainState state;
  state.model = FusedClassifier(config);
  state.max_length = static_cast<std::size_t>(train.front().sequence.rows());
  ParamList params = state.model.parameters();
  Adam adam(params, AdamConfig{config.learning_rate});
  std::mt19937_64 rng(config.seed + 0x9e3779b97f4a7c15ULL);
  std::vector<Eigen::MatrixXd> best;
  double best_f1 = -1, best_acc = -1;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(usable.begin(), usable.end(), rng);
    double loss_sum = 0;
    for (std::size_t b = 0; b < usable.size(); b += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t e = std::min(usable.size(), b + static_cast<std::size_t>(config.batch_size));
      std::vector<const EncodedTweet*> batch(usable.begin() + static_cast<std::ptrdiff_t>(b),
                                             usable.begin() + static_cast<std::ptrdiff_t>(e));
      zero_grads(params);
      const double l = state.model.loss(batch, true, &rng, weight);
      if (!std::isfinite(l)) {
        throw DivergenceError("classifier: non-finite loss in epoch " + std::to_string(epoch));
      }
      loss_sum += l * static_cast<double>(batch.size());
      adam.step();
    }
    std::vector<Label> pred;
    for (const auto& p : predict_encoded(state.model, validation)) pred.push_back(p.label);
    MetricsReport m = compute_metrics(pred, gold);
    EpochRecord rec{epoch, loss_sum / static_cast<double>(usable.size()), m.accuracy, m.f1};
    state.history.push_back(rec);
    spdlog::info("classifier epoch {}: loss {:.4f}, validation accuracy {:.4f}, F1 {:.4f}",
                 epoch, rec.train_loss, rec.validation_accuracy, rec.validation_f1);
    if (m.f1 > best_f1 || (m.f1 == best_f1 && m.accuracy > best_acc)) {
      best_f1 = m.f1;
      best_acc = m.accuracy;
      state.best_epoch = epoch;
      best.clear();
      for (const Param* p : params) best.push_back(p->value);
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best[i];
  zero_grads(params);
  return state;
}

}  // namespace cyber

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cyberevent/container.h"
#include "cyberevent/data.h"
#include "cyberevent/metrics.h"
#include "cyberevent/nn.h"

namespace cyber {

// A tweet ready for the classifier: static meta-embedding rows (L_max x D,
// padded rows zero), number of real tokens, and the contextual vector.
struct EncodedTweet {
  std::string id;
  RowMatrix sequence;
  std::size_t length = 0;
  Eigen::VectorXd context;
  std::optional<Label> label;
};

struct ClassifierConfig {
  int dim = 100;
  int filters = 100;
  std::vector<int> widths{2, 3, 5};
  int hidden = 100;
  double learning_rate = 1e-3;
  int epochs = 10;
  int batch_size = 32;
  double dropout = 0.5;
  bool class_weights = false;
  std::uint64_t seed = 1;
};

// CNN branch (valid convolutions per width, ReLU, global max pool), BiLSTM
// branch (final forward and backward states) and the contextual vector,
// concatenated into one dense layer with a 2-way softmax.
// Class index 0 is event, 1 is non_event.
class FusedClassifier {
 public:
  struct Cache;

  FusedClassifier() = default;
  explicit FusedClassifier(const ClassifierConfig& config);

  const ClassifierConfig& config() const { return config_; }
  int cnn_size() const { return config_.filters * static_cast<int>(config_.widths.size()); }
  int bilstm_size() const { return 2 * config_.hidden; }
  int fused_size() const { return cnn_size() + bilstm_size() + config_.dim; }

  // Only windows fully inside the real tokens are pooled (one window over the
  // zero-padded start when the tweet is shorter than the filter), so extra
  // padding never changes the result. Throws ShapeError when L_max is
  // shorter than the widest filter.
  Eigen::VectorXd cnn_forward(const RowMatrix& sequence, std::size_t length,
                              Cache* cache = nullptr) const;
  // Throws DegenerateInputError when length is 0.
  Eigen::VectorXd bilstm_forward(const RowMatrix& sequence, std::size_t length,
                                 Cache* cache = nullptr) const;
  Eigen::VectorXd fused_input(const EncodedTweet& tweet, Cache* cache = nullptr) const;
  Eigen::VectorXd logits(const EncodedTweet& tweet) const;
  // [p(event), p(non_event)]; dropout is off.
  Eigen::VectorXd probabilities(const EncodedTweet& tweet) const;

  // Mean (optionally class-weighted) cross-entropy over the batch. With
  // `dropout_rng` set, inverted dropout is applied to the fused vector.
  double loss(const std::vector<const EncodedTweet*>& batch, bool accumulate_gradient,
              std::mt19937_64* dropout_rng = nullptr,
              const Eigen::Vector2d& class_weight = Eigen::Vector2d::Ones());

  ParamList parameters();
  ParamList cnn_parameters();
  ParamList lstm_parameters();
  ParamList head_parameters() { return head_.parameters(); }
  Dense& head() { return head_; }

  void write(Container& c) const;
  void read(const Container& c);

 private:
  ClassifierConfig config_;
  std::vector<Conv1d> convs_;
  Lstm forward_lstm_, backward_lstm_;
  Dense head_;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0;
  double validation_accuracy = 0;
  double validation_f1 = 0;
};

struct TrainState {
  FusedClassifier model;  // best-validation checkpoint
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  std::size_t max_length = 0;

  Container to_container() const;
  static TrainState from_container(const Container& c);
  void save(const std::string& path) const { to_container().save(path); }
  static TrainState load(const std::string& path);
};

// Adam on shuffled mini-batches; keeps the parameters of the epoch with the
// best validation F1. Throws DataError on empty sets or a single-class
// training set and DivergenceError on a non-finite loss.
TrainState train_classifier(const std::vector<EncodedTweet>& train,
                            const std::vector<EncodedTweet>& validation,
                            const ClassifierConfig& config);

Label predicted_label(const Eigen::VectorXd& probabilities);
std::vector<Prediction> predict_encoded(const FusedClassifier& model,
                                        const std::vector<EncodedTweet>& tweets);

}  // namespace cyber

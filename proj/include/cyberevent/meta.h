#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cyberevent/container.h"
#include "cyberevent/embeddings.h"
#include "cyberevent/nn.h"
#include "cyberevent/text.h"

namespace cyber {

struct MetaTrainConfig {
  int epochs = 100;
  int batch_size = 100;
  bool shuffle = true;
  double validation_split = 0.1;
  double learning_rate = 0.01;
  std::uint64_t seed = 1;
};

struct MetaHistory {
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
  int best_epoch = 0;  // 1-based
};

// Convolutional autoencoder over a 3 x D channel stack, read as a length-D
// sequence with 3 input channels.
//
//   encoder: conv(3->F, k) ReLU, conv(F->F, k) ReLU, dense(F*D -> D) linear
//   decoder: dense(D -> F*D) ReLU, conv(F->F, k) ReLU, conv(F->3, k) linear
//
// Convolutions are stride 1 with same padding.
class MetaEncoder {
 public:
  MetaEncoder() = default;
  MetaEncoder(int dim, int filters = 32, int kernel = 3, std::uint64_t seed = 1);

  int dim() const { return dim_; }
  int filters() const { return filters_; }
  int kernel() const { return kernel_; }

  // Batched forward: stacks are laid out as 3 x (D * batch).
  Eigen::MatrixXd encode_batch(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd reconstruct_batch(const Eigen::MatrixXd& x) const;

  Eigen::VectorXd encode(const TokenStack& stack) const;
  TokenStack decode(const Eigen::VectorXd& latent) const;
  TokenStack reconstruct(const TokenStack& stack) const;

  // Mean squared reconstruction error of the batch (mean over samples of the
  // per-element mean). Accumulates parameter gradients when asked.
  double loss(const Eigen::MatrixXd& x, bool accumulate_gradient);

  ParamList parameters();
  bool all_finite();

  Container to_container() const;
  static MetaEncoder from_container(const Container& c);
  void save(const std::string& path) const { to_container().save(path); }
  static MetaEncoder load(const std::string& path);

  MetaHistory history;

 private:
  int dim_ = 0, filters_ = 0, kernel_ = 0;
  Conv1d enc1_, enc2_;
  Dense to_latent_, from_latent_;
  Conv1d dec1_, dec2_;
};

// Packs stacks side by side into a 3 x (D * n) batch matrix.
Eigen::MatrixXd pack_stacks(const std::vector<TokenStack>& stacks,
                            const std::vector<std::size_t>& order,
                            std::size_t begin, std::size_t end);

MetaEncoder train_meta_encoder(const std::vector<TokenStack>& stacks,
                               const MetaTrainConfig& config);

// Stack of every vocabulary token (index >= 1): the autoencoder's training set.
std::vector<TokenStack> vocabulary_stacks(const EmbeddingSet& embeddings);

Eigen::VectorXd encode_token(const TokenStack& stack, const MetaEncoder& encoder);

// L_max x D matrix; row t is the meta-embedding of real token t, padded rows
// are zero.
RowMatrix encode_sequence(const PaddedSequence& tweet,
                          const EmbeddingSet& embeddings,
                          const MetaEncoder& encoder);

}  // namespace cyber

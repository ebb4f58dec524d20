#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cyberevent/container.h"
#include "cyberevent/text.h"
#include "cyberevent/vocab.h"

namespace cyber {

enum class Channel { kWord2Vec = 0, kGlove = 1, kFastText = 2 };

std::string_view channel_name(Channel c);
Channel parse_channel(std::string_view name);

// V x D matrix for one embedding channel. Row 0 (padding) is all zeros.
struct EmbeddingTable {
  Channel channel = Channel::kWord2Vec;
  Vocabulary vocab;
  RowMatrix vectors;

  int dim() const { return static_cast<int>(vectors.cols()); }
  bool all_finite() const { return vectors.allFinite(); }

  Container to_container() const;
  static EmbeddingTable from_container(const Container& c);
  void save(const std::string& path) const;
  static EmbeddingTable load(const std::string& path);
  // One line per token: the token followed by D values.
  void export_text(const std::string& path) const;
};

// Character n-grams of "<word>" with n in [min_n, max_n], counted in UTF-8
// code points. The whole bracketed word is not included.
std::vector<std::string> char_ngrams(std::string_view word, int min_n, int max_n);
std::uint32_t fnv1a_hash(std::string_view s);

// Hashed n-gram vectors. Only n-grams seen while training are "known";
// each maps to the compact row of its hash bucket, so colliding n-grams
// share a vector as in the bucketed original.
struct SubwordTable {
  int min_n = 3;
  int max_n = 6;
  std::uint32_t buckets = 1u << 21;
  std::map<std::string, int> ngram_rows;
  RowMatrix rows;

  // Rows of the known n-grams of `word`, in extraction order.
  std::vector<int> known_rows(std::string_view word) const;

  void write(Container& c) const;
  static SubwordTable read(const Container& c);
};

struct SkipGramConfig {
  int dim = 100;
  int window = 5;
  int negatives = 5;
  double alpha = 0.025;
  int iters = 5;
  std::uint64_t seed = 1;
};

struct FastTextConfig : SkipGramConfig {
  int min_n = 3;
  int max_n = 6;
  std::uint32_t buckets = 1u << 21;
};

struct GloveConfig {
  int dim = 100;
  int window = 5;
  double learning_rate = 0.01;
  int epochs = 10;
  double x_max = 100.0;
  double alpha_weight = 0.75;
  std::uint64_t seed = 1;
};

// Per-epoch objective values. For GloVe, entry 0 is the objective of the
// initial parameters and entry e the objective after epoch e.
struct TrainingTrace {
  std::vector<double> loss;
};

// Skip-gram with negative sampling, linear learning-rate decay.
EmbeddingTable train_word2vec(const std::vector<TokenizedTweet>& corpus,
                              const Vocabulary& vocab, SkipGramConfig config,
                              TrainingTrace* trace = nullptr);

struct FastTextModel {
  EmbeddingTable words;
  SubwordTable subwords;
};

// Skip-gram where the input vector is the mean of the word row and its
// n-gram rows.
FastTextModel train_fasttext(const std::vector<TokenizedTweet>& corpus,
                             const Vocabulary& vocab, FastTextConfig config,
                             TrainingTrace* trace = nullptr);

// Symmetric window co-occurrence counts weighted by 1/distance, keyed by
// vocabulary index pairs (OOV tokens removed before windowing).
using Cooccurrence = std::map<std::pair<int, int>, double>;
Cooccurrence build_cooccurrence(const std::vector<TokenizedTweet>& corpus,
                                const Vocabulary& vocab, int window);

struct GloveParams {
  RowMatrix word;
  RowMatrix context;
  Eigen::VectorXd word_bias;
  Eigen::VectorXd context_bias;
};

double glove_objective(const Cooccurrence& x, const GloveParams& p,
                       const GloveConfig& config);

EmbeddingTable train_glove(const std::vector<TokenizedTweet>& corpus,
                           const Vocabulary& vocab, const GloveConfig& config,
                           TrainingTrace* trace = nullptr);

// 3 x D stack of channel vectors; rows ordered word2vec, glove, fasttext.
using TokenStack = RowMatrix;

class EmbeddingSet {
 public:
  EmbeddingSet(EmbeddingTable word2vec, EmbeddingTable glove,
               FastTextModel fasttext);

  int dim() const { return dim_; }
  const Vocabulary& vocab() const { return word2vec_.vocab; }
  const EmbeddingTable& table(Channel c) const;
  const SubwordTable& subwords() const { return subwords_; }

  // Mean of the word row and its n-gram rows for in-vocabulary tokens; mean
  // of known n-gram rows otherwise. Zero (and *known = false) when the token
  // has no known n-gram and is not in the vocabulary.
  Eigen::VectorXd fasttext_vector(std::string_view token,
                                  bool* known = nullptr) const;

  // Never throws. OOV tokens get zero word2vec/glove rows; "<pad>" is all zero.
  TokenStack lookup_stack(std::string_view token) const;

 private:
  EmbeddingTable word2vec_;
  EmbeddingTable glove_;
  EmbeddingTable fasttext_;
  SubwordTable subwords_;
  RowMatrix served_fasttext_;
  int dim_ = 0;
};

}  // namespace cyber

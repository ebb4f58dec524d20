#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cyberevent/config.h"
#include "cyberevent/context.h"
#include "cyberevent/data.h"
#include "cyberevent/model.h"

namespace cyber {

// Models every classifier input depends on. They are trained once and then
// frozen.
struct Upstream {
  std::shared_ptr<const EmbeddingSet> embeddings;
  std::shared_ptr<const MetaEncoder> meta;
  ContextModels context;
  std::shared_ptr<const MetaFeaturizer> featurizer;

  // Rebuilds `featurizer` from `embeddings` and `meta`.
  void bind();
};

std::vector<TokenizedTweet> tokenize_corpus(const std::vector<RawTweet>& tweets);

// Vocabulary (min_count) plus the three channels on one corpus.
EmbeddingSet train_embedding_set(const std::vector<TokenizedTweet>& corpus,
                                 const PipelineConfig& config);
MetaEncoder train_meta(const EmbeddingSet& embeddings, const PipelineConfig& config);
// Topic model, plus a CRF trained on `bio` when given or else on gazetteer
// projections of the corpus.
ContextModels train_context(const std::vector<TokenizedTweet>& corpus,
                            const Vocabulary& vocab, const PipelineConfig& config,
                            const Gazetteer& gazetteer,
                            const std::vector<NerSequence>* bio = nullptr);

// Embedding channels on disk: <dir>/word2vec.bin, glove.bin, fasttext.bin.
void save_embedding_set(const std::string& dir, const EmbeddingSet& set);
EmbeddingSet load_embedding_set(const std::string& dir);
void save_context(const std::string& dir, const ContextModels& models);
ContextModels load_context(const std::string& dir);

// Longest training tweet, at least the configured floor and the widest
// filter.
std::size_t compute_max_length(const std::vector<TokenizedTweet>& train,
                               const PipelineConfig& config);

EncodedTweet encode_tweet(const TokenizedTweet& tweet, std::optional<Label> label,
                          std::size_t max_length, const Upstream& upstream,
                          const AblationSpec& spec = AblationSpec());
std::vector<EncodedTweet> encode_tweets(const std::vector<RawTweet>& tweets,
                                        std::size_t max_length, const Upstream& upstream,
                                        const AblationSpec& spec = AblationSpec());

// normalize, tokenize, pad, encode, classify. An empty tweet is non_event.
Prediction predict_text(const std::string& id, const std::string& text,
                        const TrainState& state, const Upstream& upstream);

}  // namespace cyber

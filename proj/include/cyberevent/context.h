#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cyberevent/embeddings.h"
#include "cyberevent/ie.h"
#include "cyberevent/lda.h"
#include "cyberevent/meta.h"
#include "cyberevent/ner.h"

namespace cyber {

// f: token -> meta-embedding (encoder applied to the token's channel stack).
// The null token "" maps to the zero vector. Vocabulary tokens are encoded
// once up front; other tokens are encoded on demand.
class MetaFeaturizer {
 public:
  MetaFeaturizer(std::shared_ptr<const EmbeddingSet> embeddings,
                 std::shared_ptr<const MetaEncoder> encoder);

  int dim() const { return encoder_->dim(); }
  Eigen::VectorXd operator()(std::string_view token) const;
  // L_max x D; padded rows zero.
  RowMatrix sequence(const PaddedSequence& tweet) const;

  const EmbeddingSet& embeddings() const { return *embeddings_; }
  const MetaEncoder& encoder() const { return *encoder_; }

 private:
  std::shared_ptr<const EmbeddingSet> embeddings_;
  std::shared_ptr<const MetaEncoder> encoder_;
  RowMatrix cache_;  // vocabulary index -> meta-embedding
};

// Which contextual channels contribute to the embedding.
struct AblationSpec {
  bool lda = true;
  bool ner = true;
  bool ie = true;
  std::string name() const;  // "All", "NER&LDA", ..., "none"
};

struct ContextualEmbedding {
  Eigen::VectorXd vector;
  std::string topic_token;              // "" when absent or disabled
  std::vector<std::string> entities;    // N tokens
  std::vector<std::string> relations;   // M tokens
  std::size_t ner_count() const { return entities.size(); }
  std::size_t ie_count() const { return relations.size(); }
};

struct ContextModels {
  TopicModel topics;
  NerModel ner;
};

// gamma = (f(topic) + sum f(entity_i) + sum f(relation_j)) / (N + M + 1).
// Disabled or empty channels add nothing to the numerator or the counts.
ContextualEmbedding contextual_encode(const TokenizedTweet& tweet,
                                      const ContextModels& models,
                                      const MetaFeaturizer& f,
                                      const AblationSpec& spec = AblationSpec());

}  // namespace cyber

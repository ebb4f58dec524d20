#include "cyberevent/context.h"

#include "cyberevent/errors.h"

namespace cyber {

MetaFeaturizer::MetaFeaturizer(std::shared_ptr<const EmbeddingSet> embeddings,
                               std::shared_ptr<const MetaEncoder> encoder)
    : embeddings_(std::move(embeddings)), encoder_(std::move(encoder)) {
  if (embeddings_->dim() != encoder_->dim()) {
    throw ShapeError("meta-encoder dimension " + std::to_string(encoder_->dim()) +
                     " does not match embeddings dimension " +
                     std::to_string(embeddings_->dim()));
  }
  const auto& vocab = embeddings_->vocab();
  cache_ = RowMatrix::Zero(static_cast<Eigen::Index>(vocab.size()), dim());
  if (vocab.size() > 1) {
    auto stacks = vocabulary_stacks(*embeddings_);
    std::vector<std::size_t> order(stacks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    constexpr std::size_t kChunk = 256;
    for (std::size_t b = 0; b < stacks.size(); b += kChunk) {
      const std::size_t e = std::min(stacks.size(), b + kChunk);
      Eigen::MatrixXd latent = encoder_->encode_batch(pack_stacks(stacks, order, b, e));
      for (std::size_t i = b; i < e; ++i) {
        cache_.row(static_cast<Eigen::Index>(i + 1)) =
            latent.col(static_cast<Eigen::Index>(i - b)).transpose();
      }
    }
  }
}

Eigen::VectorXd MetaFeaturizer::operator()(std::string_view token) const {
  if (token.empty() || token == Vocabulary::kPadToken) return Eigen::VectorXd::Zero(dim());
  const int idx = embeddings_->vocab().index(token);
  if (idx > 0) return cache_.row(idx).transpose();
  return encode_token(embeddings_->lookup_stack(token), *encoder_);
}

RowMatrix MetaFeaturizer::sequence(const PaddedSequence& tweet) const {
  RowMatrix out = RowMatrix::Zero(static_cast<Eigen::Index>(tweet.max_length()), dim());
  for (std::size_t t = 0; t < tweet.length(); ++t) {
    out.row(static_cast<Eigen::Index>(t)) = (*this)(tweet.tokens[t]).transpose();
  }
  return out;
}

std::string AblationSpec::name() const {
  if (lda && ner && ie) return "All";
  std::string s;
  auto add = [&s](const char* part) { s += (s.empty() ? "" : "&") + std::string(part); };
  // Row labels follow the conventional table order.
  if (ner && lda) return "NER&LDA";
  if (lda && ie) return "LDA&IE";
  if (ner && ie) return "NER&IE";
  if (ie) add("IE");
  if (ner) add("NER");
  if (lda) add("LDA");
  return s.empty() ? "none" : s;
}

ContextualEmbedding contextual_encode(const TokenizedTweet& tweet,
                                      const ContextModels& models,
                                      const MetaFeaturizer& f,
                                      const AblationSpec& spec) {
  ContextualEmbedding out;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(f.dim());
  if (spec.lda) {
    out.topic_token = lda_topic_token(tweet, models.topics);
    if (!out.topic_token.empty()) sum += f(out.topic_token);
  }
  if (spec.ner) {
    out.entities = ner_tokens(tweet, models.ner);
    for (const auto& t : out.entities) sum += f(t);
  }
  if (spec.ie) {
    out.relations = relation_tokens(ie_extract(tweet));
    for (const auto& t : out.relations) sum += f(t);
  }
  out.vector = sum / static_cast<double>(out.ner_count() + out.ie_count() + 1);
  return out;
}

}  // namespace cyber

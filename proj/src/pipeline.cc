#include "cyberevent/pipeline.h"

#include <algorithm>
#include <filesystem>

#include <spdlog/spdlog.h>

#include "cyberevent/errors.h"

namespace cyber {

void Upstream::bind() {
  featurizer = std::make_shared<const MetaFeaturizer>(embeddings, meta);
}

std::vector<TokenizedTweet> tokenize_corpus(const std::vector<RawTweet>& tweets) {
  std::vector<TokenizedTweet> out;
  out.reserve(tweets.size());
  for (const auto& t : tweets) out.push_back(tokenize_tweet(t.id, t.text));
  return out;
}

EmbeddingSet train_embedding_set(const std::vector<TokenizedTweet>& corpus,
                                 const PipelineConfig& config) {
  Vocabulary vocab = Vocabulary::build(corpus, config.min_count);
  spdlog::info("vocabulary: {} tokens (min_count {})", vocab.size() - 1, config.min_count);
  EmbeddingTable w2v = train_word2vec(corpus, vocab, config.word2vec);
  EmbeddingTable glove = train_glove(corpus, vocab, config.glove);
  FastTextModel ft = train_fasttext(corpus, vocab, config.fasttext);
  return EmbeddingSet(std::move(w2v), std::move(glove), std::move(ft));
}

MetaEncoder train_meta(const EmbeddingSet& embeddings, const PipelineConfig& config) {
  MetaTrainConfig mc = config.meta;
  auto stacks = vocabulary_stacks(embeddings);
  MetaEncoder enc = train_meta_encoder(stacks, mc);
  return enc;
}

ContextModels train_context(const std::vector<TokenizedTweet>& corpus, const Vocabulary& vocab,
                            const PipelineConfig& config, const Gazetteer& gazetteer,
                            const std::vector<NerSequence>* bio) {
  ContextModels m;
  LdaConfig lc = config.lda;
  const int usable = static_cast<int>(vocab.size()) - 1;
  if (lc.num_topics > usable) {
    throw ConfigError("num_topics " + std::to_string(lc.num_topics) +
                      " exceeds the vocabulary size " + std::to_string(usable));
  }
  m.topics = train_lda(corpus, vocab, lc);
  std::vector<NerSequence> labeled = bio ? *bio : distant_label(corpus, gazetteer);
  if (labeled.empty()) throw DataError("no sequences to train the NER model on");
  m.ner = train_crf_ner(labeled, config.crf, gazetteer);
  return m;
}

void save_embedding_set(const std::string& dir, const EmbeddingSet& set) {
  std::filesystem::create_directories(dir);
  set.table(Channel::kWord2Vec).save(dir + "/word2vec.bin");
  set.table(Channel::kGlove).save(dir + "/glove.bin");
  Container ft = set.table(Channel::kFastText).to_container();
  set.subwords().write(ft);
  ft.save(dir + "/fasttext.bin");
}

EmbeddingSet load_embedding_set(const std::string& dir) {
  Container ft = Container::load(dir + "/fasttext.bin", "embedding:fasttext");
  FastTextModel model{EmbeddingTable::from_container(ft), SubwordTable::read(ft)};
  return EmbeddingSet(EmbeddingTable::load(dir + "/word2vec.bin"),
                      EmbeddingTable::load(dir + "/glove.bin"), std::move(model));
}

void save_context(const std::string& dir, const ContextModels& models) {
  std::filesystem::create_directories(dir);
  models.topics.to_container().save(dir + "/topics.bin");
  models.ner.to_container().save(dir + "/ner.bin");
}

ContextModels load_context(const std::string& dir) {
  ContextModels m;
  m.topics = TopicModel::from_container(Container::load(dir + "/topics.bin", "topic-model"));
  m.ner = NerModel::from_container(Container::load(dir + "/ner.bin", "ner-crf"));
  return m;
}

std::size_t compute_max_length(const std::vector<TokenizedTweet>& train,
                               const PipelineConfig& config) {
  std::size_t len = config.max_length_floor;
  for (int w : config.classifier.widths) len = std::max(len, static_cast<std::size_t>(w));
  for (const auto& t : train) len = std::max(len, t.tokens.size());
  return len;
}

EncodedTweet encode_tweet(const TokenizedTweet& tweet, std::optional<Label> label,
                          std::size_t max_length, const Upstream& upstream,
                          const AblationSpec& spec) {
  TokenizedTweet t = tweet.tokens.size() > max_length ? truncate_tokens(tweet, max_length)
                                                      : tweet;
  PaddedSequence padded = pad_to_max(t, max_length);
  EncodedTweet e;
  e.id = t.original_id;
  e.sequence = upstream.featurizer->sequence(padded);
  e.length = padded.length();
  e.context = contextual_encode(t, upstream.context, *upstream.featurizer, spec).vector;
  e.label = label;
  return e;
}

std::vector<EncodedTweet> encode_tweets(const std::vector<RawTweet>& tweets,
                                        std::size_t max_length, const Upstream& upstream,
                                        const AblationSpec& spec) {
  std::vector<EncodedTweet> out;
  out.reserve(tweets.size());
  for (const auto& t : tweets) {
    TokenizedTweet tok = tokenize_tweet(t.id, t.text);
    upstream.embeddings->vocab().bind(tok);
    out.push_back(encode_tweet(tok, t.label, max_length, upstream, spec));
  }
  return out;
}

Prediction predict_text(const std::string& id, const std::string& text, const TrainState& state,
                        const Upstream& upstream) {
  TokenizedTweet tok = tokenize_tweet(id, text);
  if (tok.tokens.empty()) {
    spdlog::warn("tweet '{}' has no tokens; predicting non_event", id);
    return {id, Label::kNonEvent, 0.0};
  }
  upstream.embeddings->vocab().bind(tok);
  EncodedTweet e = encode_tweet(tok, std::nullopt, state.max_length, upstream);
  Eigen::VectorXd p = state.model.probabilities(e);
  return {id, predicted_label(p), p[0]};
}

}  // namespace cyber

#include <sstream>
#include <unordered_map>

#include "cyberevent/embeddings.h"
#include "cyberevent/errors.h"
#include "skipgram.h"

namespace cyber {

std::uint32_t fnv1a_hash(std::string_view s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

std::vector<std::string> char_ngrams(std::string_view word, int min_n, int max_n) {
  std::string bracketed = "<" + std::string(word) + ">";
  // Byte offsets of code point starts, plus the end.
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < bracketed.size(); ++i) {
    if ((static_cast<unsigned char>(bracketed[i]) & 0xC0) != 0x80) starts.push_back(i);
  }
  const std::size_t points = starts.size();
  starts.push_back(bracketed.size());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < points; ++i) {
    for (int n = min_n; n <= max_n; ++n) {
      std::size_t end = i + static_cast<std::size_t>(n);
      if (end > points) break;
      if (i == 0 && end == points) continue;  // the whole "<word>"
      out.push_back(bracketed.substr(starts[i], starts[end] - starts[i]));
    }
  }
  return out;
}

std::vector<int> SubwordTable::known_rows(std::string_view word) const {
  std::vector<int> out;
  for (const auto& g : char_ngrams(word, min_n, max_n)) {
    auto it = ngram_rows.find(g);
    if (it != ngram_rows.end()) out.push_back(it->second);
  }
  return out;
}

void SubwordTable::write(Container& c) const {
  std::vector<std::string> grams;
  Eigen::VectorXd row_ids(static_cast<Eigen::Index>(ngram_rows.size()));
  Eigen::Index k = 0;
  for (const auto& [g, r] : ngram_rows) {
    grams.push_back(g);
    row_ids[k++] = r;
  }
  c.put_strings("subword.ngrams", std::move(grams));
  c.put_vector("subword.row_ids", row_ids);
  c.put_matrix("subword.rows", rows);
  c.put_text("subword.config", std::to_string(min_n) + " " + std::to_string(max_n) +
                                   " " + std::to_string(buckets));
}

SubwordTable SubwordTable::read(const Container& c) {
  SubwordTable t;
  std::istringstream cfg(c.text("subword.config"));
  if (!(cfg >> t.min_n >> t.max_n >> t.buckets)) {
    throw IoError("malformed subword.config block");
  }
  const auto& grams = c.strings("subword.ngrams");
  t.rows = c.matrix("subword.rows");
  if (grams.empty()) return t;
  Eigen::VectorXd ids = c.vector("subword.row_ids");
  if (static_cast<std::size_t>(ids.size()) != grams.size()) {
    throw IoError("subword blocks disagree in length");
  }
  for (std::size_t i = 0; i < grams.size(); ++i) {
    int r = static_cast<int>(ids[static_cast<Eigen::Index>(i)]);
    if (r < 0 || r >= t.rows.rows()) throw IoError("subword row index out of range");
    t.ngram_rows.emplace(grams[i], r);
  }
  return t;
}

FastTextModel train_fasttext(const std::vector<TokenizedTweet>& corpus,
                             const Vocabulary& vocab, FastTextConfig config,
                             TrainingTrace* trace) {
  internal::validate(config);
  if (config.negatives < 1) config.negatives = 1;
  if (config.min_n < 1 || config.max_n < config.min_n) {
    throw ConfigError("fastText: need 1 <= min_n <= max_n");
  }
  if (config.buckets == 0) throw ConfigError("fastText: buckets must be positive");

  const int v = static_cast<int>(vocab.size());
  SubwordTable sub;
  sub.min_n = config.min_n;
  sub.max_n = config.max_n;
  sub.buckets = config.buckets;

  // Compact rows are assigned to hash buckets in first-seen order.
  std::unordered_map<std::uint32_t, int> bucket_rows;
  std::vector<std::vector<int>> input_rows(v);
  for (int w = 1; w < v; ++w) {
    input_rows[w].push_back(w);
    for (const auto& g : char_ngrams(vocab.token(w), config.min_n, config.max_n)) {
      std::uint32_t bucket = fnv1a_hash(g) % config.buckets;
      auto [it, inserted] =
          bucket_rows.emplace(bucket, static_cast<int>(bucket_rows.size()));
      sub.ngram_rows.emplace(g, it->second);
      input_rows[w].push_back(v + it->second);
    }
  }
  const int u = static_cast<int>(bucket_rows.size());

  std::mt19937_64 rng(config.seed);
  RowMatrix input(v + u, config.dim);
  for (Eigen::Index i = 0; i < input.size(); ++i) {
    input.data()[i] = (2.0 * internal::uniform01(rng) - 1.0) / config.dim;
  }
  input.row(0).setZero();
  RowMatrix output = RowMatrix::Zero(v, config.dim);
  internal::run_skipgram(internal::index_sentences(corpus, vocab), vocab,
                         input_rows, input, output, config, rng, trace);

  FastTextModel model;
  model.words = EmbeddingTable{Channel::kFastText, vocab, input.topRows(v)};
  model.words.vectors.row(0).setZero();
  sub.rows = input.bottomRows(u);
  model.subwords = std::move(sub);
  return model;
}

}  // namespace cyber

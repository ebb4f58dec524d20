#include "cyberevent/vocab.h"

#include <algorithm>
#include <map>

#include "cyberevent/errors.h"

namespace cyber {

Vocabulary::Vocabulary() {
  tokens_.emplace_back(kPadToken);
  counts_.push_back(0);
  index_.emplace(kPadToken, kPadIndex);
}

Vocabulary Vocabulary::build(const std::vector<TokenizedTweet>& corpus,
                             int min_count) {
  if (corpus.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
  std::unordered_map<std::string, std::int64_t> counts;
  for (const auto& t : corpus) {
    for (const auto& tok : t.tokens) ++counts[tok];
  }
  std::vector<std::pair<std::string, std::int64_t>> kept;
  for (auto& [tok, c] : counts) {
    if (c >= min_count && tok != kPadToken) kept.emplace_back(tok, c);
  }
  if (kept.empty()) {
    throw ConfigError("vocabulary is empty with min_count=" +
                      std::to_string(min_count));
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  Vocabulary v;
  v.min_count_ = min_count;
  for (auto& [tok, c] : kept) {
    v.index_.emplace(tok, static_cast<int>(v.tokens_.size()));
    v.tokens_.push_back(tok);
    v.counts_.push_back(c);
  }
  return v;
}

Vocabulary Vocabulary::from_entries(const std::vector<std::string>& tokens,
                                    const std::vector<std::int64_t>& counts) {
  if (tokens.empty() || tokens[0] != kPadToken || tokens.size() != counts.size()) {
    throw IoError("malformed vocabulary block");
  }
  Vocabulary v;
  v.min_count_ = 1;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    v.index_.emplace(tokens[i], static_cast<int>(i));
    v.tokens_.push_back(tokens[i]);
    v.counts_.push_back(counts[i]);
  }
  if (v.tokens_.size() > 1) {
    v.min_count_ = static_cast<int>(*std::min_element(v.counts_.begin() + 1, v.counts_.end()));
  }
  return v;
}

int Vocabulary::index(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kOovIndex : it->second;
}

void Vocabulary::bind(TokenizedTweet& tweet) const {
  tweet.indices.clear();
  tweet.indices.reserve(tweet.tokens.size());
  for (const auto& tok : tweet.tokens) {
    int i = index(tok);
    tweet.indices.push_back(i == kPadIndex ? kOovIndex : i);
  }
}

std::vector<int> Vocabulary::known_indices(const TokenizedTweet& tweet) const {
  std::vector<int> out;
  for (const auto& tok : tweet.tokens) {
    int i = index(tok);
    if (i > 0) out.push_back(i);
  }
  return out;
}

}  // namespace cyber

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cyberevent/text.h"

namespace cyber {

// Token <-> index map. Index 0 is the reserved padding entry "<pad>" with
// count 0; real tokens follow ordered by (count desc, token asc).
class Vocabulary {
 public:
  static constexpr std::string_view kPadToken = "<pad>";

  Vocabulary();

  // Counts every token of the corpus and keeps those with count >= min_count.
  static Vocabulary build(const std::vector<TokenizedTweet>& corpus,
                          int min_count);
  // Rebuilds from persisted (token, count) pairs, row order preserved.
  static Vocabulary from_entries(const std::vector<std::string>& tokens,
                                 const std::vector<std::int64_t>& counts);

  std::size_t size() const { return tokens_.size(); }
  int index(std::string_view token) const;  // kOovIndex if absent
  bool contains(std::string_view token) const { return index(token) > 0; }
  const std::string& token(int index) const { return tokens_.at(index); }
  std::int64_t count(int index) const { return counts_.at(index); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  int min_count() const { return min_count_; }

  void bind(TokenizedTweet& tweet) const;
  // In-vocabulary indices of a tweet, OOV tokens dropped.
  std::vector<int> known_indices(const TokenizedTweet& tweet) const;

 private:
  std::vector<std::string> tokens_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, int> index_;
  int min_count_ = 1;
};

}  // namespace cyber

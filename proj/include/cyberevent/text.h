#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace cyber {

inline constexpr std::string_view kUrlToken = "<url>";
inline constexpr std::string_view kUserToken = "<user>";
inline constexpr std::string_view kNumToken = "<num>";

bool is_placeholder(std::string_view token);
// True when the token has no letters or digits.
bool is_punctuation(std::string_view token);

// Tweet normalization:
//   - URLs (http://, https://, www.) become <url>
//   - @handles become <user>
//   - the '#' of a hashtag is dropped, the body kept (no decomposition)
//   - ASCII is lowercased
//   - digit runs (with inner '.' ',' ':') become <num>
//   - a character repeated more than 3 times is collapsed to 3
//   - punctuation is split from words, whitespace collapsed to single spaces
std::string normalize(std::string_view text);

// Splits normalized text on whitespace, then separates maximal runs of word
// characters from maximal runs of punctuation. The placeholders <url>,
// <user> and <num> are always single tokens.
std::vector<std::string> tokenize(std::string_view normalized);

struct TokenizedTweet {
  std::string original_id;
  std::vector<std::string> tokens;
  // Vocabulary indices once bound; kOovIndex for tokens outside it.
  std::vector<int> indices;
};

inline constexpr int kPadIndex = 0;
inline constexpr int kOovIndex = -1;

TokenizedTweet tokenize_tweet(std::string_view id, std::string_view raw_text);

struct PaddedSequence {
  std::string original_id;
  std::vector<std::string> tokens;  // real tokens only
  std::vector<int> indices;         // length L_max
  std::vector<bool> mask;           // true at real positions

  std::size_t length() const { return tokens.size(); }
  std::size_t max_length() const { return indices.size(); }
};

// Right-pads with kPadIndex. Throws LengthError when the tweet is longer
// than max_length; truncation is the caller's decision.
PaddedSequence pad_to_max(const TokenizedTweet& tweet, std::size_t max_length);

// Keeps the first max_length tokens, logging a warning when anything is cut.
TokenizedTweet truncate_tokens(TokenizedTweet tweet, std::size_t max_length);

}  // namespace cyber

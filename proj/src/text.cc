#include "cyberevent/text.h"

#include <array>
#include <cctype>

#include <spdlog/spdlog.h>

#include "cyberevent/errors.h"

namespace cyber {
namespace {

constexpr std::array<std::string_view, 3> kPlaceholders = {kUrlToken, kUserToken,
                                                           kNumToken};

bool is_space(unsigned char c) { return std::isspace(c) != 0; }
bool is_word(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }
bool is_handle_char(unsigned char c) { return std::isalnum(c) || c == '_'; }

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (s.size() - pos < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) != prefix[i]) {
      return false;
    }
  }
  return true;
}

std::size_t placeholder_at(std::string_view s, std::size_t pos) {
  for (auto p : kPlaceholders) {
    if (s.substr(pos, p.size()) == p) return p.size();
  }
  return 0;
}

std::string rewrite(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 16);
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    auto c = static_cast<unsigned char>(text[i]);
    bool at_boundary = i == 0 || !is_word(static_cast<unsigned char>(text[i - 1]));
    if (at_boundary && (starts_with_ci(text, i, "http://") ||
                        starts_with_ci(text, i, "https://") ||
                        starts_with_ci(text, i, "www."))) {
      while (i < n && !is_space(static_cast<unsigned char>(text[i]))) ++i;
      out += " <url> ";
      continue;
    }
    if (c == '@' && at_boundary && i + 1 < n &&
        is_handle_char(static_cast<unsigned char>(text[i + 1]))) {
      ++i;
      while (i < n && is_handle_char(static_cast<unsigned char>(text[i]))) ++i;
      out += " <user> ";
      continue;
    }
    if (c == '#' && i + 1 < n && is_word(static_cast<unsigned char>(text[i + 1]))) {
      ++i;
      continue;
    }
    if (std::isdigit(c)) {
      while (i < n) {
        if (std::isdigit(static_cast<unsigned char>(text[i]))) {
          ++i;
        } else if ((text[i] == '.' || text[i] == ',' || text[i] == ':') &&
                   i + 1 < n && std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
          ++i;
        } else {
          break;
        }
      }
      out += " <num> ";
      continue;
    }
    out.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    ++i;
  }
  return out;
}

std::string collapse_elongation(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  int run = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto c = static_cast<unsigned char>(s[i]);
    run = (i > 0 && s[i] == s[i - 1]) ? run + 1 : 1;
    if (c < 0x80 && !is_space(c) && run > 3) continue;
    out.push_back(s[i]);
  }
  return out;
}

}  // namespace

bool is_placeholder(std::string_view token) {
  for (auto p : kPlaceholders) {
    if (token == p) return true;
  }
  return false;
}

bool is_punctuation(std::string_view token) {
  for (unsigned char c : token) {
    if (is_word(c)) return false;
  }
  return !token.empty();
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    auto c = static_cast<unsigned char>(s[i]);
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (std::size_t len = placeholder_at(s, i)) {
      tokens.emplace_back(s.substr(i, len));
      i += len;
      continue;
    }
    std::size_t j = i;
    if (is_word(c)) {
      while (j < n && is_word(static_cast<unsigned char>(s[j]))) ++j;
    } else {
      while (j < n) {
        auto d = static_cast<unsigned char>(s[j]);
        if (is_space(d) || is_word(d) || (j > i && placeholder_at(s, j))) break;
        ++j;
      }
    }
    tokens.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::string normalize(std::string_view text) {
  std::string collapsed = collapse_elongation(rewrite(text));
  std::string out;
  for (const auto& t : tokenize(collapsed)) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

TokenizedTweet tokenize_tweet(std::string_view id, std::string_view raw_text) {
  TokenizedTweet t;
  t.original_id = std::string(id);
  t.tokens = tokenize(normalize(raw_text));
  return t;
}

PaddedSequence pad_to_max(const TokenizedTweet& tweet, std::size_t max_length) {
  if (tweet.indices.size() != tweet.tokens.size()) {
    throw ShapeError("pad_to_max: tweet '" + tweet.original_id +
                     "' has not been bound to a vocabulary");
  }
  if (tweet.tokens.size() > max_length) {
    throw LengthError("tweet '" + tweet.original_id + "' has " +
                      std::to_string(tweet.tokens.size()) +
                      " tokens, more than the maximum " +
                      std::to_string(max_length));
  }
  PaddedSequence p;
  p.original_id = tweet.original_id;
  p.tokens = tweet.tokens;
  p.indices.assign(max_length, kPadIndex);
  p.mask.assign(max_length, false);
  for (std::size_t i = 0; i < tweet.tokens.size(); ++i) {
    p.indices[i] = tweet.indices[i];
    p.mask[i] = true;
  }
  return p;
}

TokenizedTweet truncate_tokens(TokenizedTweet tweet, std::size_t max_length) {
  if (tweet.tokens.size() > max_length) {
    spdlog::warn("tweet '{}' truncated from {} to {} tokens", tweet.original_id,
                 tweet.tokens.size(), max_length);
    tweet.tokens.resize(max_length);
    if (tweet.indices.size() > max_length) tweet.indices.resize(max_length);
  }
  return tweet;
}

}  // namespace cyber

#pragma once

#include <string>
#include <vector>

#include "cyberevent/text.h"

namespace cyber {

// Coarse part-of-speech letters used by the extractor:
//   N noun  R pronoun  V verb  X auxiliary/modal  J adjective  A adverb
//   D determiner  P preposition  C conjunction  T "to"  M number
//   U punctuation or placeholder
char pos_tag(const std::string& token);
std::string pos_tags(const std::vector<std::string>& tokens);

struct RelationTriple {
  std::vector<std::string> subject;
  std::vector<std::string> relation;
  std::vector<std::string> object;
  // Token offsets into the source tweet, for the in-order invariant.
  std::size_t subject_begin = 0, relation_begin = 0, object_begin = 0;

  std::size_t size() const { return subject.size() + relation.size() + object.size(); }
};

// Noun phrase, verb phrase, noun phrase extraction. A relation is a verb
// group optionally followed by non-verb words ending in a preposition or
// "to" (the ReVerb V | VP | VW*P shape), chosen longest-first.
std::vector<RelationTriple> ie_extract(const std::vector<std::string>& tokens);
inline std::vector<RelationTriple> ie_extract(const TokenizedTweet& tweet) {
  return ie_extract(tweet.tokens);
}

// Subject, relation and object tokens of every triple, in order.
std::vector<std::string> relation_tokens(const std::vector<RelationTriple>& triples);

}  // namespace cyber

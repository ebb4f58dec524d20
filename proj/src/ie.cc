#include "cyberevent/ie.h"

#include <algorithm>
#include <cctype>
#include <regex>
#include <string_view>
#include <unordered_map>

namespace cyber {
namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() + 1 && s.substr(s.size() - suffix.size()) == suffix;
}

const std::unordered_map<std::string, char>& lexicon() {
  static const auto* table = [] {
    auto* m = new std::unordered_map<std::string, char>();
    auto add = [m](char tag, std::initializer_list<const char*> words) {
      for (const char* w : words) m->emplace(w, tag);
    };
    add('D', {"a", "an", "the", "this", "that", "these", "those", "my", "your", "his",
              "her", "its", "our", "their", "some", "any", "every", "each", "no",
              "all", "another", "several", "many", "much", "few", "both"});
    add('R', {"i", "you", "he", "she", "it", "we", "they", "me", "him", "us", "them",
              "anyone", "someone", "everyone", "nobody", "somebody", "everybody",
              "who", "what", "which", "something", "anything", "nothing", "everything"});
    add('X', {"is", "are", "was", "were", "be", "been", "being", "am", "has", "have",
              "had", "do", "does", "did", "can", "could", "will", "would", "shall",
              "should", "may", "might", "must", "'s", "'re", "'ve", "'ll", "'d", "not",
              "n't", "cannot"});
    add('P', {"of", "in", "on", "at", "by", "for", "with", "from", "into", "onto",
              "about", "after", "before", "over", "under", "via", "through", "across",
              "against", "as", "during", "without", "within", "between", "behind",
              "since", "until", "upon", "off", "out", "up", "down", "near", "per"});
    add('T', {"to"});
    add('C', {"and", "or", "but", "nor", "so", "yet", "if", "because", "while",
              "when", "where", "than", "then", "though", "although", "unless"});
    add('A', {"very", "really", "just", "now", "already", "still", "also", "again",
              "never", "always", "often", "soon", "here", "there", "today",
              "yesterday", "tonight", "finally", "right", "too", "quite", "even",
              "ever", "almost", "away", "afterward", "afterwards", "how", "why"});
    add('J', {"new", "old", "big", "huge", "critical", "severe", "empty", "major",
              "minor", "public", "private", "remote", "local", "serious", "aware",
              "good", "bad", "great", "nice", "best", "worst", "free", "open", "next",
              "last", "first", "second", "high", "low", "latest", "unknown", "sure",
              "happy", "sunny", "warm", "cold", "fresh", "tasty", "delicious", "fun",
              "beautiful", "lovely", "busy", "late", "early", "long", "short", "other",
              "same", "zero", "daily", "weekly", "malicious", "vulnerable", "secure",
              "insecure", "sensitive", "several"});
    add('V', {"steal", "steals", "stole", "stolen", "hack", "hacks", "leak", "leaks",
              "breach", "breaches", "exploit", "exploits", "expose", "exposes",
              "compromise", "compromises", "infect", "infects", "attack", "attacks",
              "target", "targets", "encrypt", "encrypts", "dump", "dumps", "hit",
              "hits", "take", "takes", "took", "taken", "get", "gets", "got", "make",
              "makes", "made", "find", "finds", "found", "see", "sees", "saw", "seen",
              "know", "knows", "knew", "known", "go", "goes", "went", "gone", "come",
              "comes", "came", "say", "says", "said", "tell", "tells", "told", "give",
              "gives", "gave", "given", "keep", "keeps", "kept", "let", "lets", "put",
              "puts", "run", "runs", "ran", "login", "logs", "log", "patch", "patches",
              "fix", "fixes", "release", "releases", "publish", "publishes", "report",
              "reports", "warn", "warns", "affect", "affects", "allow", "allows",
              "enable", "enables", "bypass", "bypasses", "crash", "crashes", "spread",
              "spreads", "demand", "demands", "lock", "locks", "love", "loves", "like",
              "likes", "enjoy", "enjoys", "eat", "eats", "ate", "eaten", "drink",
              "drinks", "drank", "watch", "watches", "play", "plays", "visit",
              "visits", "cook", "cooks", "bake", "bakes", "baked", "read", "reads",
              "win", "wins", "won", "lose", "loses", "lost", "meet", "meets", "met",
              "buy", "buys", "bought", "send", "sends", "sent", "need", "needs",
              "want", "wants", "think", "thinks", "thought", "feel", "feels", "felt",
              "notice", "noticed", "notices", "discover", "discovers", "click"});
    return m;
  }();
  return *table;
}

}  // namespace

char pos_tag(const std::string& token) {
  if (token.empty() || is_placeholder(token)) return token == kNumToken ? 'M' : 'U';
  if (is_punctuation(token)) return 'U';
  const auto& lex = lexicon();
  if (auto it = lex.find(token); it != lex.end()) return it->second;
  if (std::all_of(token.begin(), token.end(),
                  [](unsigned char c) { return std::isdigit(c); })) {
    return 'M';
  }
  if (ends_with(token, "ly")) return 'A';
  if (ends_with(token, "ing") || ends_with(token, "ed") || ends_with(token, "ize") ||
      ends_with(token, "ise")) {
    return 'V';
  }
  if (ends_with(token, "ous") || ends_with(token, "ive") || ends_with(token, "able") ||
      ends_with(token, "ible") || ends_with(token, "ful") || ends_with(token, "less") ||
      ends_with(token, "ic")) {
    return 'J';
  }
  return 'N';
}

std::string pos_tags(const std::vector<std::string>& tokens) {
  std::string tags;
  tags.reserve(tokens.size());
  for (const auto& t : tokens) tags.push_back(pos_tag(t));
  return tags;
}

std::vector<RelationTriple> ie_extract(const std::vector<std::string>& tokens) {
  const std::string tags = pos_tags(tokens);
  const std::size_t n = tags.size();

  // Noun phrases as [begin, end): a pronoun, or D? [JMN]* N.
  std::vector<std::pair<std::size_t, std::size_t>> nps;
  for (std::size_t i = 0; i < n;) {
    if (tags[i] == 'R') {
      nps.emplace_back(i, i + 1);
      ++i;
      continue;
    }
    std::size_t j = i + (tags[i] == 'D' ? 1 : 0);
    std::size_t last_noun = n;
    while (j < n && (tags[j] == 'J' || tags[j] == 'M' || tags[j] == 'N')) {
      if (tags[j] == 'N') last_noun = j;
      ++j;
    }
    if (last_noun != n) {
      nps.emplace_back(i, last_noun + 1);
      i = last_noun + 1;
    } else {
      ++i;
    }
  }

  static const std::regex relation_shape("^[XA]*[VX][VTAX]*([NJARDM]*[PT])?$");
  std::vector<RelationTriple> out;
  for (std::size_t s = 0; s < nps.size();) {
    std::size_t best = 0;
    for (std::size_t o = s + 1; o < nps.size(); ++o) {
      const std::size_t rb = nps[s].second, re = nps[o].first;
      if (re <= rb) continue;
      if (std::regex_match(tags.begin() + rb, tags.begin() + re, relation_shape)) {
        best = o;
      }
    }
    if (best == 0) {
      ++s;
      continue;
    }
    RelationTriple t;
    auto slice = [&](std::size_t b, std::size_t e) {
      return std::vector<std::string>(tokens.begin() + b, tokens.begin() + e);
    };
    t.subject = slice(nps[s].first, nps[s].second);
    t.relation = slice(nps[s].second, nps[best].first);
    t.object = slice(nps[best].first, nps[best].second);
    t.subject_begin = nps[s].first;
    t.relation_begin = nps[s].second;
    t.object_begin = nps[best].first;
    out.push_back(std::move(t));
    s = best;
  }
  return out;
}

std::vector<std::string> relation_tokens(const std::vector<RelationTriple>& triples) {
  std::vector<std::string> out;
  for (const auto& t : triples) {
    out.insert(out.end(), t.subject.begin(), t.subject.end());
    out.insert(out.end(), t.relation.begin(), t.relation.end());
    out.insert(out.end(), t.object.begin(), t.object.end());
  }
  return out;
}

}  // namespace cyber

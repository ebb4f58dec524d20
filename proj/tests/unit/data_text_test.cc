#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>

#include "../oracles.h"
#include "cyberevent/data.h"
#include "cyberevent/errors.h"
#include "cyberevent/langid.h"
#include "cyberevent/text.h"
#include "cyberevent/vocab.h"
#include "temp_dir.h"

using namespace cyber;

TEST_CASE("normalize replaces urls, users and numbers and lowercases") {
  CHECK(normalize("Check https://x.io NOW @bob!!!") == "check <url> now <user> !!!");
  CHECK(normalize("#databreach at ACME, 5000 records") == "databreach at acme , <num> records");
}

TEST_CASE("normalize caps character runs at three") {
  CHECK(normalize("soooooooo bad") == "sooo bad");
}

TEST_CASE("normalize is idempotent") {
  for (const char* s : {"Check https://x.io NOW @bob!!!", "#databreach at ACME, 5000 records",
                        "soooooooo bad", "  spaced   OUT\ttext ", "", "ÉCOLE fermée 12,5 %"}) {
    const std::string once = normalize(s);
    CHECK(normalize(once) == once);
  }
}

TEST_CASE("tokenize splits on whitespace") {
  auto tokens = tokenize("anyone can login as root .");
  CHECK(tokens == std::vector<std::string>{"anyone", "can", "login", "as", "root", "."});
  CHECK(tokenize("<url>") == std::vector<std::string>{"<url>"});
}

TEST_CASE("tokens keep every non-space character of the normalized text") {
  const std::string alphabet = "abcxyz019 .,!?:;'-#@/";
  std::mt19937_64 rng(6);
  for (int i = 0; i < 100; ++i) {
    std::string raw;
    const int n = static_cast<int>(rng() % 40);
    for (int k = 0; k < n; ++k) raw.push_back(alphabet[rng() % alphabet.size()]);
    const std::string text = normalize(raw);
    std::string joined;
    for (const auto& t : tokenize(text)) joined += t;
    std::string chars;
    for (char c : text) {
      if (c != ' ') chars.push_back(c);
    }
    std::sort(joined.begin(), joined.end());
    std::sort(chars.begin(), chars.end());
    CHECK_MESSAGE(joined == chars, raw);
  }
}

TEST_CASE("pad_to_max masks padding and rejects long tweets") {
  TokenizedTweet t = tokenize_tweet("a", "one two three four five");
  Vocabulary::build({t}, 1).bind(t);
  PaddedSequence p = pad_to_max(t, 7);
  CHECK(p.mask == std::vector<bool>{true, true, true, true, true, false, false});
  CHECK(p.indices.size() == 7);
  CHECK(p.indices[5] == kPadIndex);

  TokenizedTweet long_tweet = tokenize_tweet("b", "a b c d e f g h");
  Vocabulary::build({long_tweet}, 1).bind(long_tweet);
  CHECK_THROWS_AS(pad_to_max(long_tweet, 7), LengthError);
  CHECK(truncate_tokens(long_tweet, 7).tokens.size() == 7);
}

TEST_CASE("split_dataset partitions by ratio and is deterministic") {
  std::vector<RawTweet> corpus;
  for (int i = 0; i < 10; ++i) corpus.push_back({"t" + std::to_string(i), "text", {}, {}});
  DatasetSplit s = split_dataset(corpus, {0.8, 0.1, 0.1}, 7);
  CHECK(s.train.size() == 8);
  CHECK(s.validation.size() == 1);
  CHECK(s.test.size() == 1);
  DatasetSplit again = split_dataset(corpus, {0.8, 0.1, 0.1}, 7);
  CHECK(s.train == again.train);
  CHECK(s.test == again.test);

  std::vector<std::string> ids;
  for (const auto* part : {&s.train, &s.validation, &s.test}) {
    for (const auto& t : *part) ids.push_back(t.id);
  }
  std::sort(ids.begin(), ids.end());
  CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
  CHECK(ids.size() == 10);
}

TEST_CASE("seed filter keeps security tweets") {
  SeedKeywordSet seeds = SeedKeywordSet::defaults();
  CHECK(seeds.matches("new botnet discovered in the wild"));
  CHECK_FALSE(seeds.matches("lovely weather today"));
  CHECK(seeds.matches("Massive DATA-BREACH at the clinic"));
  CHECK_FALSE(seeds.matches("antimalware update"));
}

TEST_CASE("seed filter agrees with a whole-word scan and is idempotent") {
  SeedKeywordSet seeds = SeedKeywordSet::defaults();
  const std::vector<std::string> words{"botnet", "malware", "data", "breach", "denial", "of",
                                       "service", "phishing", "vulnerability", "the", "cat",
                                       "sunny", "Botnets", "malware!", "#phishing", "patch"};
  std::mt19937_64 rng(4);
  std::vector<RawTweet> corpus;
  for (int i = 0; i < 500; ++i) {
    std::string text;
    const int n = 1 + static_cast<int>(rng() % 7);
    for (int k = 0; k < n; ++k) text += words[rng() % words.size()] + " ";
    corpus.push_back({"id" + std::to_string(i), text, {}, {}});
  }
  auto kept = filter_seed_keywords(corpus, seeds);
  std::vector<RawTweet> expected;
  for (const auto& t : corpus) {
    bool hit = false;
    for (const auto& k : seeds.keywords()) hit = hit || oracle::contains_phrase(t.text, k);
    if (hit) expected.push_back(t);
  }
  CHECK(kept == expected);
  CHECK(filter_seed_keywords(kept, seeds) == kept);
}

TEST_CASE("load_jsonl skips malformed lines") {
  TempDir dir;
  const std::string path = dir.file("tweets.jsonl");
  {
    std::ofstream out(path);
    out << R"({"id": "1", "text": "first", "label": "event"})" << "\n";
    out << "{not json\n";
    out << R"({"id": "2", "text": "second", "timestamp": "2017-01-01"})" << "\n";
  }
  LoadResult r = load_jsonl(path);
  REQUIRE(r.tweets.size() == 2);
  CHECK(r.skipped == 1);
  CHECK(r.tweets[0].label == Label::kEvent);
  CHECK(r.tweets[1].timestamp == "2017-01-01");
  CHECK_FALSE(r.tweets[1].label.has_value());
}

TEST_CASE("jsonl round trip preserves the corpus") {
  TempDir dir;
  std::vector<RawTweet> corpus{{"a", "unicode ✓ \"quoted\"\nline", "t0", Label::kNonEvent},
                               {"b", "plain", {}, Label::kEvent},
                               {"c", "no label", {}, {}}};
  write_jsonl(dir.file("x.jsonl"), corpus);
  LoadResult r = load_jsonl(dir.file("x.jsonl"));
  CHECK(r.skipped == 0);
  CHECK(r.tweets == corpus);
  CHECK_THROWS_AS(load_jsonl(dir.file("missing.jsonl")), IoError);

  // Blank text violates the tweet invariant and is skipped like a bad line.
  write_jsonl(dir.file("blank.jsonl"), {{"d", "   ", {}, {}}, {"e", "ok", {}, {}}});
  LoadResult blank = load_jsonl(dir.file("blank.jsonl"));
  CHECK(blank.tweets.size() == 1);
  CHECK(blank.skipped == 1);
}

TEST_CASE("language identification") {
  LanguageIdentifier id = LanguageIdentifier::with_bundled_corpora();
  CHECK(detect_english({"1", "the server was breached last night", {}, {}}, id));
  CHECK_FALSE(detect_english({"2", "el servidor fue atacado anoche por los piratas", {}, {}}, id));
  CHECK_FALSE(detect_english({"3", "12345 678", {}, {}}, id));
  CHECK_THROWS_AS(detect_english({"4", "   ", {}, {}}, id), PreconditionError);
  CHECK_THROWS_AS(detect_english({"5", "hello", {}, {}}, LanguageIdentifier()), ConfigError);
}

TEST_CASE("vocabulary applies min_count") {
  std::vector<TokenizedTweet> corpus;
  for (int i = 0; i < 5; ++i) corpus.push_back(tokenize_tweet("e", "exploit"));
  for (int i = 0; i < 4; ++i) corpus.push_back(tokenize_tweet("z", "zzz"));
  Vocabulary v = Vocabulary::build(corpus, 5);
  CHECK(v.contains("exploit"));
  CHECK_FALSE(v.contains("zzz"));
  CHECK(v.index("zzz") == kOovIndex);
  CHECK(v.index("<pad>") == kPadIndex);
}

TEST_CASE("vocabulary counts match a naive counter") {
  std::mt19937_64 rng(8);
  const std::vector<std::string> words{"a", "b", "c", "d", "e", "f", "g"};
  std::vector<TokenizedTweet> corpus;
  std::vector<std::vector<std::string>> docs;
  for (int i = 0; i < 200; ++i) {
    std::string text;
    for (int k = 0; k < 6; ++k) text += words[rng() % (1 + rng() % words.size())] + " ";
    corpus.push_back(tokenize_tweet("x", text));
    docs.push_back(corpus.back().tokens);
  }
  Vocabulary v = Vocabulary::build(corpus, 3);
  for (const auto& [token, n] : oracle::count_tokens(docs)) {
    if (n >= 3) {
      REQUIRE(v.contains(token));
      CHECK(v.count(v.index(token)) == n);
    } else {
      CHECK_FALSE(v.contains(token));
    }
  }
}

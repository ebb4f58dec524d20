#include "cyberevent/data.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <unordered_set>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "cyberevent/errors.h"

namespace cyber {
namespace {

std::string trim(std::string_view s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::optional<RawTweet> parse_line(const std::string& line) {
  auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (!j.is_object()) return std::nullopt;
  RawTweet t;
  auto id = j.find("id");
  if (id == j.end()) return std::nullopt;
  if (id->is_string()) {
    t.id = id->get<std::string>();
  } else if (id->is_number_integer()) {
    t.id = std::to_string(id->get<long long>());
  } else {
    return std::nullopt;
  }
  auto text = j.find("text");
  if (text == j.end() || !text->is_string()) return std::nullopt;
  t.text = text->get<std::string>();
  if (t.id.empty() || trim(t.text).empty()) return std::nullopt;
  if (auto ts = j.find("timestamp"); ts != j.end() && !ts->is_null()) {
    if (!ts->is_string()) return std::nullopt;
    t.timestamp = ts->get<std::string>();
  }
  if (auto lb = j.find("label"); lb != j.end() && !lb->is_null()) {
    if (!lb->is_string()) return std::nullopt;
    t.label = parse_label(lb->get<std::string>());
    if (!t.label) return std::nullopt;
  }
  return t;
}

}  // namespace

std::string_view label_name(Label label) {
  return label == Label::kEvent ? "event" : "non_event";
}

std::optional<Label> parse_label(std::string_view name) {
  if (name == "event") return Label::kEvent;
  if (name == "non_event") return Label::kNonEvent;
  return std::nullopt;
}

LoadResult load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read corpus '" + path + "'");
  LoadResult result;
  std::unordered_set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto tweet = parse_line(line);
    if (!tweet || !seen.insert(tweet->id).second) {
      ++result.skipped;
      continue;
    }
    result.tweets.push_back(std::move(*tweet));
  }
  if (in.bad()) throw IoError("read error on '" + path + "'");
  if (result.tweets.empty()) {
    throw EmptyCorpusError("corpus '" + path + "' has no parseable lines");
  }
  if (result.skipped > 0) {
    spdlog::warn("{}: skipped {} malformed line(s)", path, result.skipped);
  }
  return result;
}

void write_jsonl(const std::string& path, const std::vector<RawTweet>& tweets) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (const auto& t : tweets) {
    nlohmann::ordered_json j;
    j["id"] = t.id;
    j["text"] = t.text;
    if (t.timestamp) j["timestamp"] = *t.timestamp;
    if (t.label) j["label"] = std::string(label_name(*t.label));
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<std::string> boundary_words(std::string_view text) {
  std::vector<std::string> words;
  std::string cur;
  for (unsigned char c : text) {
    if (is_word_byte(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

SeedKeywordSet::SeedKeywordSet(const std::vector<std::string>& phrases) {
  for (const auto& p : phrases) {
    auto words = boundary_words(p);
    if (words.empty()) continue;
    std::string joined;
    for (const auto& w : words) {
      if (!joined.empty()) joined.push_back(' ');
      joined += w;
    }
    if (std::find(keywords_.begin(), keywords_.end(), joined) != keywords_.end()) {
      continue;
    }
    keywords_.push_back(std::move(joined));
    words_.push_back(std::move(words));
  }
  if (keywords_.empty()) throw ConfigError("seed keyword set is empty");
}

SeedKeywordSet SeedKeywordSet::defaults() {
  return SeedKeywordSet({"denial of service", "botnet", "malware",
                         "vulnerability", "phishing", "data breach"});
}

SeedKeywordSet SeedKeywordSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read seed keywords '" + path + "'");
  std::vector<std::string> phrases;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    phrases.push_back(t);
  }
  return SeedKeywordSet(phrases);
}

bool SeedKeywordSet::matches(std::string_view text) const {
  auto words = boundary_words(text);
  for (const auto& seed : words_) {
    if (seed.size() > words.size()) continue;
    auto it = std::search(words.begin(), words.end(), seed.begin(), seed.end());
    if (it != words.end()) return true;
  }
  return false;
}

std::vector<RawTweet> filter_seed_keywords(const std::vector<RawTweet>& corpus,
                                           const SeedKeywordSet& seeds) {
  std::vector<RawTweet> out;
  std::copy_if(corpus.begin(), corpus.end(), std::back_inserter(out),
               [&](const RawTweet& t) { return seeds.matches(t.text); });
  return out;
}

DatasetSplit split_dataset(const std::vector<RawTweet>& corpus,
                           const SplitRatios& ratios, std::uint64_t seed) {
  if (ratios.train <= 0 || ratios.validation <= 0 || ratios.test <= 0 ||
      std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9) {
    throw ConfigError("split ratios must be positive and sum to 1");
  }
  if (corpus.size() < 3) {
    throw InsufficientDataError("need at least 3 tweets to split, got " +
                                std::to_string(corpus.size()));
  }
  const std::size_t n = corpus.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  auto n_train = static_cast<std::size_t>(std::llround(n * ratios.train));
  auto n_val = static_cast<std::size_t>(std::llround(n * ratios.validation));
  n_train = std::min(n_train, n);
  n_val = std::min(n_val, n - n_train);

  DatasetSplit split;
  split.seed = seed;
  for (std::size_t i = 0; i < n; ++i) {
    const RawTweet& t = corpus[order[i]];
    if (i < n_train) {
      split.train.push_back(t);
    } else if (i < n_train + n_val) {
      split.validation.push_back(t);
    } else {
      split.test.push_back(t);
    }
  }
  return split;
}

}  // namespace cyber

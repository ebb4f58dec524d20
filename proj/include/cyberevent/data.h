#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cyber {

enum class Label { kEvent = 0, kNonEvent = 1 };

std::string_view label_name(Label label);
// Accepts "event" / "non_event"; anything else is nullopt.
std::optional<Label> parse_label(std::string_view name);

struct RawTweet {
  std::string id;
  std::string text;
  std::optional<std::string> timestamp;
  std::optional<Label> label;

  bool operator==(const RawTweet&) const = default;
};

struct LoadResult {
  std::vector<RawTweet> tweets;
  std::size_t skipped = 0;
};

// Reads a JSON Lines corpus. Lines that are not objects, lack a nonempty
// `id`/`text`, carry an unknown label, or repeat an id are skipped and
// counted. Blank lines are ignored.
LoadResult load_jsonl(const std::string& path);
void write_jsonl(const std::string& path, const std::vector<RawTweet>& tweets);

class SeedKeywordSet {
 public:
  // Phrases are lowercased and internal whitespace collapsed.
  explicit SeedKeywordSet(const std::vector<std::string>& phrases);

  static SeedKeywordSet defaults();
  // One phrase per line; blank lines and lines starting with '#' ignored.
  static SeedKeywordSet load(const std::string& path);

  const std::vector<std::string>& keywords() const { return keywords_; }
  bool matches(std::string_view text) const;

 private:
  std::vector<std::string> keywords_;
  std::vector<std::vector<std::string>> words_;
};

// Lowercased alphanumeric words of `text`; every other ASCII byte is a
// boundary. Bytes >= 0x80 are treated as word characters.
std::vector<std::string> boundary_words(std::string_view text);

std::vector<RawTweet> filter_seed_keywords(const std::vector<RawTweet>& corpus,
                                           const SeedKeywordSet& seeds);

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

struct DatasetSplit {
  std::vector<RawTweet> train;
  std::vector<RawTweet> validation;
  std::vector<RawTweet> test;
  std::uint64_t seed = 0;
};

// Seeded shuffle, then train/validation sizes are rounded to nearest and the
// remainder goes to test.
DatasetSplit split_dataset(const std::vector<RawTweet>& corpus,
                           const SplitRatios& ratios, std::uint64_t seed);

}  // namespace cyber

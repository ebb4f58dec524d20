#pragma once

#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cyberevent/data.h"

namespace cyber {

// Character-trigram multinomial Naive Bayes language identifier.
class LanguageIdentifier {
 public:
  LanguageIdentifier() = default;

  // Trained on the small corpora compiled into the library: English plus
  // Spanish, French, German and Turkish decoys.
  static LanguageIdentifier with_bundled_corpora();

  void train(const std::string& language, const std::vector<std::string>& texts);
  bool trained() const { return !models_.empty(); }
  std::vector<std::string> languages() const;

  // Log-likelihood per trained language. Empty when the text has no
  // alphabetic content.
  std::map<std::string, double> scores(std::string_view text) const;

  // Highest scoring language, or "" when undecidable (no letters or a tie).
  std::string classify(std::string_view text) const;

 private:
  struct Model {
    std::unordered_map<std::string, double> counts;
    double total = 0;
  };
  std::map<std::string, Model> models_;
  std::unordered_map<std::string, int> trigram_vocab_;
};

// True iff English scores strictly highest. Empty text (after trimming) is a
// precondition violation; an untrained identifier is a configuration error.
bool detect_english(const RawTweet& tweet, const LanguageIdentifier& id);

std::vector<RawTweet> filter_english(const std::vector<RawTweet>& corpus,
                                     const LanguageIdentifier& id);

}  // namespace cyber

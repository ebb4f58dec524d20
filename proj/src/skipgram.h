#pragma once

// Shared skip-gram negative-sampling loop used by the word2vec and fastText
// trainers. Internal to the library.

#include <cstdint>
#include <random>
#include <vector>

#include "cyberevent/embeddings.h"

namespace cyber::internal {

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Draws vocabulary indices proportionally to count^0.75. Index 0 (padding)
// is never drawn.
class NoiseSampler {
 public:
  explicit NoiseSampler(const Vocabulary& vocab);
  int sample(std::mt19937_64& rng) const;

 private:
  std::vector<double> cumulative_;
};

// `input_rows[w]` lists the rows of `input` averaged to form the hidden
// vector of word w. Every listed row receives the full hidden gradient.
void run_skipgram(const std::vector<std::vector<int>>& sentences,
                  const Vocabulary& vocab,
                  const std::vector<std::vector<int>>& input_rows,
                  RowMatrix& input, RowMatrix& output,
                  const SkipGramConfig& config, std::mt19937_64& rng,
                  TrainingTrace* trace);

std::vector<std::vector<int>> index_sentences(
    const std::vector<TokenizedTweet>& corpus, const Vocabulary& vocab);

void validate(const SkipGramConfig& config);

}  // namespace cyber::internal

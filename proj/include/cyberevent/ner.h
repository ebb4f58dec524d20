#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "cyberevent/container.h"
#include "cyberevent/crf.h"
#include "cyberevent/data.h"
#include "cyberevent/nn.h"
#include "cyberevent/text.h"

namespace cyber {

enum BioTag : int { kOutside = 0, kBegin = 1, kInside = 2 };
inline constexpr int kNumBioTags = 3;

std::string_view bio_name(int tag);
int parse_bio(std::string_view name);  // "O", "B-ENT", "I-ENT"; throws DataError

struct NerSequence {
  std::vector<std::string> tokens;
  std::vector<int> tags;
};

// An I-ENT is only valid after B-ENT or I-ENT.
bool is_valid_bio(const std::vector<int>& tags);
// Throws DataError naming the first offending sequence.
void validate_bio(const std::vector<NerSequence>& data);

// BIO files: "token<TAB or space>tag" per line, blank line between sequences.
std::vector<NerSequence> read_bio(const std::string& path);
void write_bio(const std::string& path, const std::vector<NerSequence>& data);

// Multi-token phrase list matched longest-first over token sequences.
class Gazetteer {
 public:
  Gazetteer() = default;
  explicit Gazetteer(const std::vector<std::string>& phrases);

  // Seed phrases plus the `top_k` most frequent content words adjacent to a
  // seed occurrence (count >= min_count).
  static Gazetteer from_seeds(const std::vector<TokenizedTweet>& corpus,
                              const SeedKeywordSet& seeds, int min_count = 5,
                              int top_k = 20);
  static Gazetteer load(const std::string& path);
  void save(const std::string& path) const;

  const std::vector<std::string>& phrases() const { return phrases_; }
  // BIO tags of the longest left-to-right matches.
  std::vector<int> match(const std::vector<std::string>& tokens) const;

 private:
  std::vector<std::string> phrases_;
  std::vector<std::vector<std::string>> words_;
};

// Projects gazetteer matches onto tweets as silver BIO labels.
std::vector<NerSequence> distant_label(const std::vector<TokenizedTweet>& corpus,
                                       const Gazetteer& gazetteer);

struct CrfConfig {
  double learning_rate = 0.01;
  double l2 = 1e-2;
  int epochs = 30;
  std::uint64_t seed = 1;
};

// Linear-chain CRF tagger over {O, B-ENT, I-ENT} with sparse binary token
// features: lowercased token, shape, prefixes/suffixes up to 3 characters,
// placeholder flag, gazetteer hit, bias.
class NerModel {
 public:
  NerModel() = default;
  NerModel(std::vector<std::string> feature_names, Gazetteer gazetteer);

  std::size_t num_features() const { return feature_names_.size(); }
  const Gazetteer& gazetteer() const { return gazetteer_; }

  // Feature strings of every token (independent of the feature index).
  static std::vector<std::vector<std::string>> token_features(
      const std::vector<std::string>& tokens, const Gazetteer& gazetteer);
  // Known feature indices per token.
  std::vector<std::vector<int>> feature_ids(const std::vector<std::string>& tokens) const;

  // Scores with the BIO structure imposed (O->I and start->I forbidden).
  ChainScores scores(const std::vector<std::vector<int>>& features) const;
  std::vector<int> decode(const std::vector<std::string>& tokens) const;

  double log_likelihood(const NerSequence& seq) const;
  // sum_i log p(y_i | x_i) - l2/2 * ||theta||^2
  double objective(const std::vector<NerSequence>& data, double l2) const;
  // Adds the gradient of -objective to the parameter grads.
  double accumulate_negative_objective_gradient(const std::vector<NerSequence>& data,
                                                double l2);

  ParamList parameters() { return {&emission_, &transition_, &start_}; }

  Container to_container() const;
  static NerModel from_container(const Container& c);

 private:
  friend NerModel train_crf_ner(const std::vector<NerSequence>&, const CrfConfig&,
                                const Gazetteer&, std::vector<double>*);

  // Gradient of log p(y|x) for one sequence, scaled and added to grads.
  double add_sequence_gradient(const NerSequence& seq, double scale);

  std::vector<std::string> feature_names_;
  std::unordered_map<std::string, int> feature_index_;
  Gazetteer gazetteer_;
  Param emission_;    // features x tags
  Param transition_;  // tags x tags
  Param start_;       // tags x 1
};

// Stochastic gradient ascent on the L2-regularized conditional
// log-likelihood. `objective_trace`, when given, receives the full objective
// before training and after every epoch.
NerModel train_crf_ner(const std::vector<NerSequence>& data, const CrfConfig& config,
                       const Gazetteer& gazetteer = Gazetteer(),
                       std::vector<double>* objective_trace = nullptr);

// Tokens tagged B-ENT / I-ENT, in order.
std::vector<std::string> ner_tokens(const TokenizedTweet& tweet, const NerModel& model);

}  // namespace cyber

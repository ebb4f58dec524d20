#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cyberevent/container.h"
#include "cyberevent/text.h"
#include "cyberevent/vocab.h"

namespace cyber {

struct LdaConfig {
  int num_topics = 40;
  // chunksize and update_every are accepted for configuration compatibility;
  // the collapsed Gibbs sampler always sweeps the whole corpus.
  int chunksize = 10000;
  int update_every = 1;
  int passes = 1;
  int sweeps_per_pass = 200;  // 50 under desk scale
  double alpha = -1.0;        // <= 0 means 1 / num_topics
  double beta = 0.01;
  int inference_iterations = 50;
  std::uint64_t seed = 1;
};

struct TopicModel {
  int num_topics = 0;
  double alpha = 0;
  double beta = 0;
  int inference_iterations = 50;
  Vocabulary vocab;
  RowMatrix topic_word;  // K x V, column 0 (padding) is zero, rows sum to 1
  RowMatrix doc_topic;   // documents x K for the training corpus
  std::vector<double> log_likelihood;  // joint log p(w, z) after each sweep

  // Topic proportions of a document given as vocabulary indices, by a
  // deterministic fixed-point fold-in against the trained topics.
  Eigen::VectorXd infer(const std::vector<int>& words) const;

  Container to_container() const;
  static TopicModel from_container(const Container& c);
};

// Vocabulary indices kept for topic modelling: in-vocabulary tokens minus
// punctuation, placeholders and common English function words.
std::vector<int> lda_document(const TokenizedTweet& tweet, const Vocabulary& vocab);
bool is_stopword(std::string_view token);

TopicModel train_lda(const std::vector<std::vector<int>>& documents,
                     const Vocabulary& vocab, const LdaConfig& config);
TopicModel train_lda(const std::vector<TokenizedTweet>& corpus,
                     const Vocabulary& vocab, const LdaConfig& config);

// Most probable word of the tweet's dominant topic; "" (the null token) when
// the tweet has no usable in-vocabulary token.
std::string lda_topic_token(const TokenizedTweet& tweet, const TopicModel& model);

}  // namespace cyber

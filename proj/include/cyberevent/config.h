#pragma once

#include <cstdint>
#include <string>

#include "cyberevent/data.h"
#include "cyberevent/embeddings.h"
#include "cyberevent/lda.h"
#include "cyberevent/meta.h"
#include "cyberevent/model.h"
#include "cyberevent/ner.h"

namespace cyber {

// Every tunable of the pipeline, with production defaults;
// the INI file uses the same key names, grouped in sections:
//
//   [general]      vector_size, seed, min_count, max_length_floor
//   [lda]          num_topics, update_every, chunksize, passes, sweeps, alpha, beta
//   [word2vec]     window_size, min_count, iter, alpha, negative
//   [fasttext]     window_size, iter, alpha, negative, min_n, max_n, bucket
//   [glove]        window_size, no_components, learning_rate, epoch_num, x_max
//   [autoencoder]  nb_epoch, batch_size, shuffle, validation_split,
//                  learning_rate, filters, kernel
//   [crf]          learning_rate, l2, epochs
//   [classifier]   filters, widths, hidden, learning_rate, epochs,
//                  batch_size, dropout, class_weights
//   [split]        train, validation, test
struct PipelineConfig {
  std::uint64_t seed = 1;
  int vector_size = 100;
  int min_count = 5;
  std::size_t max_length_floor = 5;
  SkipGramConfig word2vec;
  FastTextConfig fasttext;
  GloveConfig glove;
  MetaTrainConfig meta;
  int meta_filters = 32;
  int meta_kernel = 3;
  LdaConfig lda;
  CrfConfig crf;
  ClassifierConfig classifier;
  SplitRatios split;
  bool desk_scale = false;

  // Pushes the shared seed and vector size into every component.
  void propagate();
  // Smaller hash table, fewer Gibbs sweeps and epochs.
  void apply_desk_scale();
  // INI text of the effective configuration (stable key order).
  std::string to_ini() const;
};

// Missing keys keep their defaults; unknown keys are a ConfigError.
PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(const std::string& ini_text);

}  // namespace cyber

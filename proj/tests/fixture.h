#pragma once

// Trains every stage on a synthetic corpus, the way the CLI chains them.

#include <memory>

#include "cyberevent/config.h"
#include "cyberevent/data.h"
#include "cyberevent/model.h"
#include "cyberevent/ner.h"
#include "cyberevent/pipeline.h"
#include "cyberevent/synth.h"

namespace fixture {

struct Pipeline {
  cyber::SynthCorpus corpus;
  cyber::DatasetSplit split;
  cyber::Upstream upstream;
  std::size_t max_length = 0;
};

inline Pipeline train_upstream(const cyber::SynthConfig& synth,
                               const cyber::PipelineConfig& config) {
  Pipeline p;
  p.corpus = cyber::generate_synthetic(synth);
  p.split = cyber::split_dataset(p.corpus.tweets, config.split, config.seed);
  auto train = cyber::tokenize_corpus(p.split.train);
  auto set = std::make_shared<cyber::EmbeddingSet>(cyber::train_embedding_set(train, config));
  p.upstream.embeddings = set;
  p.upstream.meta = std::make_shared<cyber::MetaEncoder>(cyber::train_meta(*set, config));
  p.upstream.context = cyber::train_context(train, set->vocab(), config,
                                            cyber::Gazetteer(p.corpus.gazetteer));
  p.upstream.bind();
  p.max_length = cyber::compute_max_length(train, config);
  return p;
}

// Desk-scale configuration with shortened upstream training, for tests that
// need trained components but not their quality.
inline cyber::PipelineConfig quick_config(std::uint64_t seed = 1) {
  cyber::PipelineConfig c;
  c.seed = seed;
  c.vector_size = 16;
  c.min_count = 2;
  c.meta_filters = 4;
  c.propagate();
  c.apply_desk_scale();
  c.word2vec.iters = 2;
  c.fasttext.iters = 2;
  c.glove.epochs = 3;
  c.meta.epochs = 3;
  c.lda.num_topics = 4;
  c.lda.sweeps_per_pass = 20;
  c.crf.epochs = 3;
  c.classifier.filters = 8;
  c.classifier.hidden = 8;
  c.classifier.epochs = 2;
  return c;
}

}  // namespace fixture

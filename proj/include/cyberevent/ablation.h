#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cyberevent/context.h"
#include "cyberevent/data.h"
#include "cyberevent/metrics.h"
#include "cyberevent/pipeline.h"

namespace cyber {

// The seven channel subsets, in table order:
// All, NER&LDA, LDA&IE, NER&IE, IE, NER, LDA.
std::vector<AblationSpec> standard_ablation_specs();

// Two-layer fully connected head over the contextual vector alone.
struct AblationHeadConfig {
  int hidden = 32;
  int epochs = 40;
  int batch_size = 32;
  double learning_rate = 1e-3;
};

struct AblationRow {
  std::string name;
  AblationSpec spec;
  std::vector<std::uint64_t> seeds;
  std::vector<double> accuracy;  // test accuracy per seed
  std::vector<MetricsReport> reports;
  double mean_accuracy() const;
  double stddev_accuracy() const;
};

struct AblationTable {
  std::vector<AblationRow> rows;
  std::string to_text() const;
  std::string to_json() const;
};

// Trains a fresh head per spec and seed on frozen upstream models; the best
// validation-accuracy epoch is evaluated on the test split.
AblationTable run_ablation(const DatasetSplit& split, const Upstream& upstream,
                           const std::vector<AblationSpec>& specs,
                           const std::vector<std::uint64_t>& seeds,
                           const AblationHeadConfig& head = AblationHeadConfig());

}  // namespace cyber

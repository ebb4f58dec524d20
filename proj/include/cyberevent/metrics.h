#pragma once

#include <string>
#include <vector>

#include "cyberevent/data.h"

namespace cyber {

// Positive class is event.
struct Confusion {
  long tp = 0, fp = 0, tn = 0, fn = 0;
  long total() const { return tp + fp + tn + fn; }
};

struct MetricsReport {
  Confusion confusion;
  double accuracy = 0, precision = 0, recall = 0, f1 = 0;
  // Set when the metric had a zero denominator and was reported as 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
  std::string fingerprint;

  std::string to_json() const;
};

MetricsReport compute_metrics(const Confusion& c);
MetricsReport compute_metrics(const std::vector<Label>& predicted,
                              const std::vector<Label>& gold);

struct Prediction {
  std::string id;
  Label label = Label::kNonEvent;
  double p_event = 0;
};

// Matches predictions to gold tweets by id. Both sides must cover exactly the
// same ids and every gold tweet must be labeled, otherwise AlignmentError.
MetricsReport evaluate(const std::vector<Prediction>& predictions,
                       const std::vector<RawTweet>& gold);

std::vector<Prediction> read_predictions(const std::string& path);
void write_predictions(const std::string& path, const std::vector<Prediction>& p);

}  // namespace cyber

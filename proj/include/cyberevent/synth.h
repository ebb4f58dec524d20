#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cyberevent/data.h"

namespace cyber {

// Planted-signal corpus. Every tweet is built as
//   [opener] subject relation object [topic words] [closer]
// Event tweets take the subject from security entities, the relation and
// object from attack phrases and the topic words from a security topic;
// non-event tweets take the neutral counterparts. A switched-off channel
// draws its slot from a pool shared by both classes, and `signal_rate` is
// the per-tweet probability that a switched-on channel is planted.
struct SynthConfig {
  int n = 2000;
  double event_fraction = 0.5;
  bool entity_signal = true;
  bool relation_signal = true;
  bool topic_signal = true;
  double signal_rate = 1.0;
  // Share of event tweets written in the style of a reported product flaw
  // ("anyone can login as root with empty password ...").
  double advisory_fraction = 0.05;
  std::uint64_t seed = 1;
};

struct SynthCorpus {
  std::vector<RawTweet> tweets;
  // Entity phrases planted in event tweets, one per line when saved.
  std::vector<std::string> gazetteer;
};

// Throws ConfigError when n < 10 or a rate is outside [0, 1].
SynthCorpus generate_synthetic(const SynthConfig& config);

// Security entity phrases the generator can plant.
const std::vector<std::string>& synthetic_security_entities();

}  // namespace cyber

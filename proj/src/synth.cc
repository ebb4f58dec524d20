#include "cyberevent/synth.h"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "cyberevent/errors.h"

namespace cyber {
namespace {

using Pool = std::vector<std::string>;

const Pool kSecurityEntities{
    "lockbit", "emotet", "wannacry", "notpetya", "trickbot", "revil", "conti ransomware",
    "lazarus group", "mirai botnet", "qakbot", "ryuk", "darkside", "cozy bear",
    "fancy bear", "zeus trojan", "dridex", "blackcat", "clop gang", "hive ransomware",
    "sandworm", "maze ransomware", "lapsus", "solarwinds hackers", "raccoon stealer"};
const Pool kNeutralEntities{
    "grandma", "chef gordon", "the lakers", "my cousin", "taylor swift", "our coach",
    "the bakery", "my roommate", "the local band", "uncle joe", "the book club",
    "the garden center", "the yankees", "my sister", "the pizza place", "aunt mary",
    "the choir", "my best friend", "the farmers market", "the neighbors",
    "the soccer team", "the art teacher", "the coffee shop", "grandpa"};
const Pool kSharedEntities{"someone", "a friend", "the company", "our team",
                           "people", "the city", "this guy", "my boss"};

const Pool kSecurityRelations{"stole", "leaked", "encrypted", "breached", "exploited",
                              "hijacked", "compromised", "wiped", "infected",
                              "ransomed", "dumped", "exfiltrated"};
const Pool kNeutralRelations{"cooked", "baked", "won", "visited", "watched", "painted",
                             "celebrated", "planted", "sang", "enjoyed", "decorated",
                             "organized"};
const Pool kSharedRelations{"posted about", "talked about", "shared", "mentioned",
                            "updated", "looked at"};

const Pool kSecurityObjects{"the customer database", "admin passwords", "the payroll servers",
                            "patient records", "the domain controller", "credit card data",
                            "the login portal", "employee credentials", "the backup servers",
                            "source code", "the email archive", "user accounts"};
const Pool kNeutralObjects{"a lasagna", "the championship", "the museum", "a birthday cake",
                           "the sunset", "a mural", "the anniversary", "tomato seedlings",
                           "the anthem", "a picnic", "the living room", "a bake sale"};
const Pool kSharedObjects{"the report", "some photos", "the website", "the schedule",
                          "a video", "the news"};

const Pool kSecurityTopic{"malware", "phishing", "vulnerability", "botnet", "exploit",
                          "patch", "firewall", "ransomware", "cve", "infosec", "threat",
                          "breach"};
const Pool kNeutralTopic{"recipe", "weekend", "football", "concert", "sunshine", "coffee",
                         "garden", "holiday", "family", "music", "dinner", "travel"};
const Pool kSharedTopic{"today", "update", "story", "thread", "again", "tonight"};

const Pool kOpeners{"", "", "wow", "breaking :", "just heard", "lol", "omg", "fyi",
                    "ok so", "heads up :"};
const Pool kClosers{"", "", "!", "...", "http://t.co/abc", "@newsdesk", "#news",
                    "right now", "unbelievable", "see thread"};
const Pool kProducts{"macos high sierra", "windows server", "the router firmware",
                     "ios", "the vpn appliance", "android"};

const std::string& pick(const Pool& pool, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
  return pool[d(rng)];
}

void append(std::string& out, const std::string& part) {
  if (part.empty()) return;
  if (!out.empty()) out += ' ';
  out += part;
}

}  // namespace

const std::vector<std::string>& synthetic_security_entities() { return kSecurityEntities; }

SynthCorpus generate_synthetic(const SynthConfig& config) {
  if (config.n < 10) throw ConfigError("synth: n must be at least 10");
  for (double r : {config.event_fraction, config.signal_rate, config.advisory_fraction}) {
    if (!(r >= 0 && r <= 1)) throw ConfigError("synth: rates must lie in [0, 1]");
  }
  std::mt19937_64 rng(config.seed);
  std::bernoulli_distribution planted(config.signal_rate);
  std::bernoulli_distribution advisory(config.advisory_fraction);
  std::uniform_int_distribution<int> topic_len(1, 3);

  const int n_event = static_cast<int>(std::lround(config.n * config.event_fraction));
  std::vector<bool> is_event(static_cast<std::size_t>(config.n), false);
  std::fill(is_event.begin(), is_event.begin() + n_event, true);
  std::shuffle(is_event.begin(), is_event.end(), rng);

  SynthCorpus corpus;
  corpus.gazetteer = kSecurityEntities;
  corpus.gazetteer.insert(corpus.gazetteer.end(), kProducts.begin(), kProducts.end());
  for (int i = 0; i < config.n; ++i) {
    const bool event = is_event[static_cast<std::size_t>(i)];
    std::string text;
    if (event && advisory(rng)) {
      text = fmt::format(
          "dear @vendorsupport , we noticed a huge security issue at {} . anyone can login as root "
          "with empty password after clicking on login button several times . are you "
          "aware of it ?",
          pick(kProducts, rng));
    } else {
      append(text, pick(kOpeners, rng));
      const bool ent = config.entity_signal && planted(rng);
      const bool rel = config.relation_signal && planted(rng);
      const bool top = config.topic_signal && planted(rng);
      append(text, pick(ent ? (event ? kSecurityEntities : kNeutralEntities) : kSharedEntities,
                        rng));
      append(text, pick(rel ? (event ? kSecurityRelations : kNeutralRelations) : kSharedRelations,
                        rng));
      append(text, pick(rel ? (event ? kSecurityObjects : kNeutralObjects) : kSharedObjects,
                        rng));
      const Pool& topic = top ? (event ? kSecurityTopic : kNeutralTopic) : kSharedTopic;
      const int words = topic_len(rng);
      for (int w = 0; w < words; ++w) append(text, "#" + pick(topic, rng));
      append(text, pick(kClosers, rng));
    }
    RawTweet t;
    t.id = fmt::format("syn-{:06d}", i + 1);
    t.text = std::move(text);
    t.label = event ? Label::kEvent : Label::kNonEvent;
    corpus.tweets.push_back(std::move(t));
  }
  return corpus;
}

}  // namespace cyber

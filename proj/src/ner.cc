#include "cyberevent/ner.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "cyberevent/errors.h"
#include "cyberevent/lda.h"

namespace cyber {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string shape_of(std::string_view token) {
  std::string s;
  for (unsigned char c : token) {
    char m = std::isdigit(c) ? 'd' : (std::isalpha(c) || c >= 0x80) ? 'x' : static_cast<char>(c);
    if (s.empty() || s.back() != m) s.push_back(m);
  }
  return s;
}

}  // namespace

std::string_view bio_name(int tag) {
  switch (tag) {
    case kOutside: return "O";
    case kBegin: return "B-ENT";
    case kInside: return "I-ENT";
  }
  return "?";
}

int parse_bio(std::string_view name) {
  if (name == "O") return kOutside;
  if (name == "B-ENT" || name == "B") return kBegin;
  if (name == "I-ENT" || name == "I") return kInside;
  throw DataError("unknown BIO tag '" + std::string(name) + "'");
}

bool is_valid_bio(const std::vector<int>& tags) {
  int prev = kOutside;
  for (int t : tags) {
    if (t < 0 || t >= kNumBioTags) return false;
    if (t == kInside && prev == kOutside) return false;
    prev = t;
  }
  return true;
}

void validate_bio(const std::vector<NerSequence>& data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& s = data[i];
    if (s.tokens.empty() || s.tokens.size() != s.tags.size()) {
      throw DataError("NER sequence " + std::to_string(i) +
                      ": tokens and tags must be nonempty and aligned");
    }
    if (!is_valid_bio(s.tags)) {
      std::string text;
      for (const auto& t : s.tokens) text += (text.empty() ? "" : " ") + t;
      throw DataError("NER sequence " + std::to_string(i) + " (\"" + text +
                      "\") is not BIO-consistent");
    }
  }
}

std::vector<NerSequence> read_bio(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read BIO file '" + path + "'");
  std::vector<NerSequence> out;
  NerSequence cur;
  std::string line;
  std::size_t line_no = 0;
  auto flush = [&] {
    if (!cur.tokens.empty()) out.push_back(std::move(cur));
    cur = NerSequence();
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string token, tag;
    if (!(fields >> token)) {
      flush();
      continue;
    }
    if (!(fields >> tag)) {
      throw DataError(path + ":" + std::to_string(line_no) + ": missing tag");
    }
    cur.tokens.push_back(token);
    cur.tags.push_back(parse_bio(tag));
  }
  flush();
  return out;
}

void write_bio(const std::string& path, const std::vector<NerSequence>& data) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (const auto& s : data) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      out << s.tokens[i] << '\t' << bio_name(s.tags[i]) << '\n';
    }
    out << '\n';
  }
}

Gazetteer::Gazetteer(const std::vector<std::string>& phrases) {
  for (const auto& p : phrases) {
    auto words = tokenize(normalize(p));
    if (words.empty()) continue;
    std::string joined;
    for (const auto& w : words) joined += (joined.empty() ? "" : " ") + w;
    if (std::find(phrases_.begin(), phrases_.end(), joined) != phrases_.end()) continue;
    phrases_.push_back(joined);
    words_.push_back(std::move(words));
  }
}

Gazetteer Gazetteer::from_seeds(const std::vector<TokenizedTweet>& corpus,
                                const SeedKeywordSet& seeds, int min_count,
                                int top_k) {
  Gazetteer seed_only(seeds.keywords());
  std::set<std::string> seed_words;
  for (const auto& w : seed_only.words_) seed_words.insert(w.begin(), w.end());
  std::map<std::string, int> counts;
  for (const auto& t : corpus) {
    auto tags = seed_only.match(t.tokens);
    for (std::size_t i = 0; i < tags.size(); ++i) {
      if (tags[i] == kOutside) continue;
      for (std::size_t j : {i - 1, i + 1}) {
        if (j >= tags.size() || tags[j] != kOutside) continue;
        const auto& w = t.tokens[j];
        if (is_punctuation(w) || is_placeholder(w) || is_stopword(w) ||
            seed_words.count(w)) {
          continue;
        }
        ++counts[w];
      }
    }
  }
  std::vector<std::pair<std::string, int>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> phrases = seed_only.phrases_;
  for (const auto& [w, c] : ranked) {
    if (static_cast<int>(phrases.size() - seed_only.phrases_.size()) >= top_k) break;
    if (c >= min_count) phrases.push_back(w);
  }
  return Gazetteer(phrases);
}

Gazetteer Gazetteer::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read gazetteer '" + path + "'");
  std::vector<std::string> phrases;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') phrases.push_back(line);
  }
  return Gazetteer(phrases);
}

void Gazetteer::save(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (const auto& p : phrases_) out << p << '\n';
}

std::vector<int> Gazetteer::match(const std::vector<std::string>& tokens) const {
  std::vector<int> tags(tokens.size(), kOutside);
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t best = 0;
    for (const auto& w : words_) {
      if (w.size() <= best || i + w.size() > tokens.size()) continue;
      if (std::equal(w.begin(), w.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
        best = w.size();
      }
    }
    if (best == 0) {
      ++i;
      continue;
    }
    tags[i] = kBegin;
    for (std::size_t j = 1; j < best; ++j) tags[i + j] = kInside;
    i += best;
  }
  return tags;
}

std::vector<NerSequence> distant_label(const std::vector<TokenizedTweet>& corpus,
                                       const Gazetteer& gazetteer) {
  std::vector<NerSequence> out;
  for (const auto& t : corpus) {
    if (t.tokens.empty()) continue;
    out.push_back({t.tokens, gazetteer.match(t.tokens)});
  }
  return out;
}

NerModel::NerModel(std::vector<std::string> feature_names, Gazetteer gazetteer)
    : feature_names_(std::move(feature_names)),
      gazetteer_(std::move(gazetteer)),
      emission_("crf.emission", static_cast<Eigen::Index>(feature_names_.size()),
                kNumBioTags),
      transition_("crf.transition", kNumBioTags, kNumBioTags),
      start_("crf.start", kNumBioTags, 1) {
  for (std::size_t i = 0; i < feature_names_.size(); ++i) {
    feature_index_.emplace(feature_names_[i], static_cast<int>(i));
  }
}

std::vector<std::vector<std::string>> NerModel::token_features(
    const std::vector<std::string>& tokens, const Gazetteer& gazetteer) {
  auto gaz = gazetteer.match(tokens);
  std::vector<std::vector<std::string>> out(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& w = tokens[i];
    auto& f = out[i];
    f.push_back("bias");
    f.push_back("w=" + w);
    f.push_back("shape=" + shape_of(w));
    for (std::size_t n = 1; n <= 3 && n <= w.size(); ++n) {
      f.push_back("p" + std::to_string(n) + "=" + w.substr(0, n));
      f.push_back("s" + std::to_string(n) + "=" + w.substr(w.size() - n));
    }
    if (is_placeholder(w)) f.push_back("placeholder");
    if (gaz[i] != kOutside) f.push_back(gaz[i] == kBegin ? "gaz=B" : "gaz=I");
  }
  return out;
}

std::vector<std::vector<int>> NerModel::feature_ids(
    const std::vector<std::string>& tokens) const {
  auto names = token_features(tokens, gazetteer_);
  std::vector<std::vector<int>> out(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (const auto& n : names[i]) {
      auto it = feature_index_.find(n);
      if (it != feature_index_.end()) out[i].push_back(it->second);
    }
  }
  return out;
}

ChainScores NerModel::scores(const std::vector<std::vector<int>>& features) const {
  ChainScores s;
  const auto len = static_cast<Eigen::Index>(features.size());
  s.emission = Eigen::MatrixXd::Zero(len, kNumBioTags);
  for (Eigen::Index t = 0; t < len; ++t) {
    for (int f : features[t]) s.emission.row(t) += emission_.value.row(f);
  }
  s.transition = transition_.value;
  s.transition(kOutside, kInside) = kNegInf;
  s.start = start_.value.col(0);
  s.start[kInside] = kNegInf;
  return s;
}

std::vector<int> NerModel::decode(const std::vector<std::string>& tokens) const {
  if (tokens.empty()) return {};
  return viterbi(scores(feature_ids(tokens)));
}

double NerModel::log_likelihood(const NerSequence& seq) const {
  ChainScores s = scores(feature_ids(seq.tokens));
  return sequence_score(s, seq.tags) - log_partition(s);
}

double NerModel::objective(const std::vector<NerSequence>& data, double l2) const {
  double ll = 0;
  for (const auto& seq : data) ll += log_likelihood(seq);
  const double norm = emission_.value.squaredNorm() +
                      transition_.value.squaredNorm() + start_.value.squaredNorm();
  return ll - 0.5 * l2 * norm;
}

double NerModel::add_sequence_gradient(const NerSequence& seq, double scale) {
  auto feats = feature_ids(seq.tokens);
  ChainScores s = scores(feats);
  ChainMarginals m = chain_marginals(s);
  const double ll = sequence_score(s, seq.tags) - m.log_z;
  // Observed minus expected feature counts.
  Eigen::MatrixXd node = -m.node;
  for (std::size_t t = 0; t < seq.tags.size(); ++t) {
    node(static_cast<Eigen::Index>(t), seq.tags[t]) += 1.0;
  }
  for (std::size_t t = 0; t < feats.size(); ++t) {
    for (int f : feats[t]) {
      emission_.grad.row(f) += scale * node.row(static_cast<Eigen::Index>(t));
    }
  }
  Eigen::MatrixXd trans = -m.transition;
  for (std::size_t t = 1; t < seq.tags.size(); ++t) trans(seq.tags[t - 1], seq.tags[t]) += 1.0;
  trans(kOutside, kInside) = 0.0;
  transition_.grad += scale * trans;
  Eigen::VectorXd st = -m.node.row(0).transpose();
  st[seq.tags[0]] += 1.0;
  st[kInside] = 0.0;
  start_.grad.col(0) += scale * st;
  return ll;
}

double NerModel::accumulate_negative_objective_gradient(
    const std::vector<NerSequence>& data, double l2) {
  double ll = 0;
  for (const auto& seq : data) ll += add_sequence_gradient(seq, -1.0);
  double norm = 0;
  for (Param* p : parameters()) {
    p->grad += l2 * p->value;
    norm += p->value.squaredNorm();
  }
  return -(ll - 0.5 * l2 * norm);
}

Container NerModel::to_container() const {
  Container c("ner-crf");
  c.put_strings("features", feature_names_);
  c.put_strings("gazetteer", gazetteer_.phrases());
  c.put_matrix(emission_.name, emission_.value);
  c.put_matrix(transition_.name, transition_.value);
  c.put_matrix(start_.name, start_.value);
  return c;
}

NerModel NerModel::from_container(const Container& c) {
  NerModel m(c.strings("features"), Gazetteer(c.strings("gazetteer")));
  read_params(c, m.parameters());
  return m;
}

NerModel train_crf_ner(const std::vector<NerSequence>& data, const CrfConfig& config,
                       const Gazetteer& gazetteer, std::vector<double>* objective_trace) {
  if (data.empty()) throw DataError("CRF: need at least one labeled sequence");
  validate_bio(data);
  if (config.epochs < 0 || config.learning_rate <= 0 || config.l2 < 0) {
    throw ConfigError("CRF: invalid training configuration");
  }
  // Feature inventory in first-seen order.
  std::vector<std::string> names;
  std::unordered_map<std::string, int> seen;
  for (const auto& seq : data) {
    for (const auto& fs : NerModel::token_features(seq.tokens, gazetteer)) {
      for (const auto& f : fs) {
        if (seen.emplace(f, static_cast<int>(names.size())).second) names.push_back(f);
      }
    }
  }
  NerModel model(std::move(names), gazetteer);
  const ParamList params = model.parameters();
  const double n = static_cast<double>(data.size());
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);

  if (objective_trace) objective_trace->push_back(model.objective(data, config.l2));
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      zero_grads(params);
      model.add_sequence_gradient(data[i], 1.0);
      for (Param* p : params) {
        p->value += config.learning_rate * (p->grad - (config.l2 / n) * p->value);
      }
    }
    if (objective_trace) {
      double obj = model.objective(data, config.l2);
      objective_trace->push_back(obj);
      spdlog::debug("CRF epoch {}: objective {:.6f}", epoch + 1, obj);
    }
  }
  zero_grads(params);
  return model;
}

std::vector<std::string> ner_tokens(const TokenizedTweet& tweet, const NerModel& model) {
  std::vector<std::string> out;
  auto tags = model.decode(tweet.tokens);
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] != kOutside) out.push_back(tweet.tokens[i]);
  }
  return out;
}

}  // namespace cyber

#include "cyberevent/metrics.h"

#include <fstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "cyberevent/errors.h"

namespace cyber {

MetricsReport compute_metrics(const Confusion& c) {
  MetricsReport r;
  r.confusion = c;
  const long total = c.total();
  r.accuracy = total ? static_cast<double>(c.tp + c.tn) / static_cast<double>(total) : 0.0;
  if (c.tp + c.fp == 0) {
    r.precision_undefined = true;
  } else {
    r.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  }
  if (c.tp + c.fn == 0) {
    r.recall_undefined = true;
  } else {
    r.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  }
  if (r.precision + r.recall == 0) {
    r.f1_undefined = true;
  } else {
    r.f1 = 2 * r.precision * r.recall / (r.precision + r.recall);
  }
  return r;
}

MetricsReport compute_metrics(const std::vector<Label>& predicted,
                              const std::vector<Label>& gold) {
  if (predicted.size() != gold.size()) {
    throw AlignmentError("prediction count " + std::to_string(predicted.size()) +
                         " differs from gold count " + std::to_string(gold.size()));
  }
  Confusion c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool p = predicted[i] == Label::kEvent, g = gold[i] == Label::kEvent;
    if (p && g) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return compute_metrics(c);
}

MetricsReport evaluate(const std::vector<Prediction>& predictions,
                       const std::vector<RawTweet>& gold) {
  std::unordered_map<std::string, Label> by_id;
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.id, p.label).second) {
      throw AlignmentError("duplicate prediction id '" + p.id + "'");
    }
  }
  if (by_id.size() != gold.size()) {
    throw AlignmentError("prediction ids (" + std::to_string(by_id.size()) +
                         ") do not match gold ids (" + std::to_string(gold.size()) + ")");
  }
  std::vector<Label> pred, truth;
  for (const auto& g : gold) {
    auto it = by_id.find(g.id);
    if (it == by_id.end()) throw AlignmentError("no prediction for id '" + g.id + "'");
    if (!g.label) throw AlignmentError("gold tweet '" + g.id + "' has no label");
    pred.push_back(it->second);
    truth.push_back(*g.label);
  }
  return compute_metrics(pred, truth);
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["accuracy"] = accuracy;
  j["precision"] = precision;
  j["recall"] = recall;
  j["f1"] = f1;
  j["confusion"] = {{"tp", confusion.tp}, {"fp", confusion.fp},
                    {"tn", confusion.tn}, {"fn", confusion.fn}};
  j["zero_division"] = {{"precision", precision_undefined},
                        {"recall", recall_undefined},
                        {"f1", f1_undefined}};
  j["fingerprint"] = fingerprint;
  return j.dump(2);
}

std::vector<Prediction> read_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read predictions '" + path + "'");
  std::vector<Prediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      Prediction p;
      p.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
      auto label = parse_label(j.at("label").get<std::string>());
      if (!label) throw DataError("unknown label");
      p.label = *label;
      p.p_event = j.value("p_event", 0.0);
      out.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_predictions(const std::string& path, const std::vector<Prediction>& preds) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (const auto& p : preds) {
    nlohmann::ordered_json j;
    j["id"] = p.id;
    j["label"] = std::string(label_name(p.label));
    j["p_event"] = p.p_event;
    out << j.dump() << '\n';
  }
}

}  // namespace cyber

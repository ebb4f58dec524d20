#include "cyberevent/manifest.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "cyberevent/errors.h"

namespace cyber {
namespace {

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream o;
  o << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return o.str();
}

std::string digest(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  std::ostringstream o;
  for (unsigned int i = 0; i < len; ++i) {
    o << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return o.str();
}

}  // namespace

std::string sha256_hex(const std::string& bytes) { return digest(bytes); }

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return digest(buf.str());
}

RunManifest::RunManifest(std::string path, std::string subcommand)
    : path_(std::move(path)), subcommand_(std::move(subcommand)) {}

void RunManifest::add_input(const std::string& path) {
  inputs_.emplace_back(path, sha256_file(path));
}

void RunManifest::add_output(const std::string& path) { outputs_.push_back(path); }

void RunManifest::begin() {
  started_ = now_utc();
  write("incomplete", "");
}

void RunManifest::complete() { write("complete", ""); }

void RunManifest::fail(const std::string& message) { write("failed", message); }

void RunManifest::write(const std::string& status, const std::string& error) const {
  nlohmann::ordered_json j;
  j["subcommand"] = subcommand_;
  j["version"] = kVersion;
  j["status"] = status;
  if (!error.empty()) j["error"] = error;
  j["started_at"] = started_;
  if (status != "incomplete") j["finished_at"] = now_utc();
  j["arguments"] = args_;
  j["seeds"] = seeds_;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  for (const auto& [p, d] : inputs_) inputs.push_back({{"path", p}, {"sha256", d}});
  j["inputs"] = inputs;
  nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
  for (const auto& p : outputs_) {
    nlohmann::ordered_json o{{"path", p}};
    if (status == "complete" && std::filesystem::exists(p)) o["sha256"] = sha256_file(p);
    outputs.push_back(o);
  }
  j["outputs"] = outputs;
  j["config"] = config_;
  const auto parent = std::filesystem::path(path_).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path_, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest '" + path_ + "'");
  out << j.dump(2) << '\n';
}

}  // namespace cyber

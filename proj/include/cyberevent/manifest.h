#pragma once

#include <map>
#include <string>
#include <vector>

namespace cyber {

inline constexpr const char* kVersion = "0.1.0";

// Lowercase hex SHA-256 of a file's bytes; throws IoError when unreadable.
std::string sha256_file(const std::string& path);
std::string sha256_hex(const std::string& bytes);

// Provenance record of one subcommand run. It is written with status
// "incomplete" before any artifact and rewritten as "complete" or "failed"
// at the end, so partial outputs are always marked.
class RunManifest {
 public:
  RunManifest(std::string path, std::string subcommand);

  void set_config(const std::string& ini) { config_ = ini; }
  void set_seed(const std::string& name, unsigned long long seed) { seeds_[name] = seed; }
  void set_argument(const std::string& name, const std::string& value) { args_[name] = value; }
  void add_input(const std::string& path);
  void add_output(const std::string& path);

  void begin();
  void complete();
  void fail(const std::string& message);

  const std::string& path() const { return path_; }

 private:
  void write(const std::string& status, const std::string& error) const;

  std::string path_;
  std::string subcommand_;
  std::string config_;
  std::map<std::string, unsigned long long> seeds_;
  std::map<std::string, std::string> args_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::string> outputs_;
  std::string started_;
};

}  // namespace cyber

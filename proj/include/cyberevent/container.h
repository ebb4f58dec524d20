#pragma once

// Binary artifact container shared by every trained component.
//
// Layout (all integers little-endian as written by the host, with an
// endianness marker so a mismatching reader can refuse the file):
//
//   magic        4 bytes  "CYEV"
//   version      u32
//   endianness   u32      0x01020304
//   kind         string   e.g. "embedding:word2vec", "meta-encoder"
//   block count  u32
//   blocks...    { type u8, name string, payload }
//
// Payloads: matrix = rows u64, cols u64, row-major f64 data;
// strings = count u64, strings; text = string.
// A string is a u64 byte length followed by the raw bytes.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cyber {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Container {
 public:
  Container() = default;
  explicit Container(std::string kind) : kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

  void put_matrix(const std::string& name, const RowMatrix& m);
  void put_matrix(const std::string& name, const Eigen::MatrixXd& m);
  void put_vector(const std::string& name, const Eigen::VectorXd& v);
  void put_strings(const std::string& name, std::vector<std::string> s);
  void put_text(const std::string& name, std::string text);

  bool has(const std::string& name) const;
  const RowMatrix& matrix(const std::string& name) const;
  Eigen::MatrixXd dense(const std::string& name) const;
  Eigen::VectorXd vector(const std::string& name) const;
  const std::vector<std::string>& strings(const std::string& name) const;
  const std::string& text(const std::string& name) const;

  std::string serialize() const;
  static Container deserialize(const std::string& bytes);

  void save(const std::string& path) const;
  static Container load(const std::string& path);
  // Loads and checks the kind tag.
  static Container load(const std::string& path, const std::string& kind);

 private:
  std::string kind_;
  // Insertion order is kept so serialization is stable.
  std::vector<std::string> order_;
  std::map<std::string, RowMatrix> matrices_;
  std::map<std::string, std::vector<std::string>> strings_;
  std::map<std::string, std::string> texts_;

  void remember(const std::string& name);
};

}  // namespace cyber

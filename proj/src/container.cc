#include "cyberevent/container.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cyberevent/errors.h"

namespace cyber {
namespace {

constexpr char kMagic[4] = {'C', 'Y', 'E', 'V'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kEndianMarker = 0x01020304;

enum BlockType : std::uint8_t { kMatrix = 0, kStrings = 1, kText = 2 };

class Writer {
 public:
  template <typename T>
  void pod(T v) {
    out_.append(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void str(const std::string& s) {
    pod<std::uint64_t>(s.size());
    out_.append(s);
  }
  void raw(const void* p, std::size_t n) {
    out_.append(static_cast<const char*>(p), n);
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}
  template <typename T>
  T pod() {
    T v;
    need(sizeof(T));
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string str() {
    auto n = pod<std::uint64_t>();
    need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void raw(void* p, std::size_t n) {
    need(n);
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (n > in_.size() - pos_) throw IoError("container: truncated data");
  }
  const std::string& in_;
  std::size_t pos_ = 0;
};

}  // namespace

void Container::remember(const std::string& name) {
  if (std::find(order_.begin(), order_.end(), name) == order_.end()) {
    order_.push_back(name);
  }
}

void Container::put_matrix(const std::string& name, const RowMatrix& m) {
  matrices_[name] = m;
  remember(name);
}

void Container::put_matrix(const std::string& name, const Eigen::MatrixXd& m) {
  put_matrix(name, RowMatrix(m));
}

void Container::put_vector(const std::string& name, const Eigen::VectorXd& v) {
  put_matrix(name, RowMatrix(v.transpose()));
}

void Container::put_strings(const std::string& name,
                            std::vector<std::string> s) {
  strings_[name] = std::move(s);
  remember(name);
}

void Container::put_text(const std::string& name, std::string text) {
  texts_[name] = std::move(text);
  remember(name);
}

bool Container::has(const std::string& name) const {
  return matrices_.count(name) || strings_.count(name) || texts_.count(name);
}

const RowMatrix& Container::matrix(const std::string& name) const {
  auto it = matrices_.find(name);
  if (it == matrices_.end()) {
    throw IoError("container '" + kind_ + "': missing matrix block '" + name +
                  "'");
  }
  return it->second;
}

Eigen::MatrixXd Container::dense(const std::string& name) const {
  return Eigen::MatrixXd(matrix(name));
}

Eigen::VectorXd Container::vector(const std::string& name) const {
  const RowMatrix& m = matrix(name);
  if (m.rows() != 1) throw ShapeError("container: block '" + name + "' is not a vector");
  return m.row(0).transpose();
}

const std::vector<std::string>& Container::strings(
    const std::string& name) const {
  auto it = strings_.find(name);
  if (it == strings_.end()) {
    throw IoError("container '" + kind_ + "': missing string block '" + name +
                  "'");
  }
  return it->second;
}

const std::string& Container::text(const std::string& name) const {
  auto it = texts_.find(name);
  if (it == texts_.end()) {
    throw IoError("container '" + kind_ + "': missing text block '" + name +
                  "'");
  }
  return it->second;
}

std::string Container::serialize() const {
  Writer w;
  w.raw(kMagic, 4);
  w.pod(kVersion);
  w.pod(kEndianMarker);
  w.str(kind_);
  w.pod<std::uint32_t>(order_.size());
  for (const auto& name : order_) {
    if (auto it = matrices_.find(name); it != matrices_.end()) {
      const RowMatrix& m = it->second;
      w.pod<std::uint8_t>(kMatrix);
      w.str(name);
      w.pod<std::uint64_t>(m.rows());
      w.pod<std::uint64_t>(m.cols());
      w.raw(m.data(), sizeof(double) * m.size());
    } else if (auto it = strings_.find(name); it != strings_.end()) {
      w.pod<std::uint8_t>(kStrings);
      w.str(name);
      w.pod<std::uint64_t>(it->second.size());
      for (const auto& s : it->second) w.str(s);
    } else {
      w.pod<std::uint8_t>(kText);
      w.str(name);
      w.str(texts_.at(name));
    }
  }
  return w.take();
}

Container Container::deserialize(const std::string& bytes) {
  Reader r(bytes);
  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw IoError("container: bad magic");
  if (r.pod<std::uint32_t>() != kVersion) {
    throw IoError("container: unsupported version");
  }
  if (r.pod<std::uint32_t>() != kEndianMarker) {
    throw IoError("container: endianness mismatch");
  }
  Container c(r.str());
  auto count = r.pod<std::uint32_t>();
  for (std::uint32_t b = 0; b < count; ++b) {
    auto type = r.pod<std::uint8_t>();
    std::string name = r.str();
    switch (type) {
      case kMatrix: {
        auto rows = r.pod<std::uint64_t>();
        auto cols = r.pod<std::uint64_t>();
        RowMatrix m(rows, cols);
        r.raw(m.data(), sizeof(double) * rows * cols);
        c.put_matrix(name, m);
        break;
      }
      case kStrings: {
        auto n = r.pod<std::uint64_t>();
        std::vector<std::string> s;
        s.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) s.push_back(r.str());
        c.put_strings(name, std::move(s));
        break;
      }
      case kText:
        c.put_text(name, r.str());
        break;
      default:
        throw IoError("container: unknown block type");
    }
  }
  if (!r.done()) throw IoError("container: trailing bytes");
  return c;
}

void Container::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  std::string bytes = serialize();
  out.write(bytes.data(), bytes.size());
  if (!out) throw IoError("write failed for '" + path + "'");
}

Container Container::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

Container Container::load(const std::string& path, const std::string& kind) {
  Container c = load(path);
  if (c.kind() != kind) {
    throw IoError("'" + path + "' holds a '" + c.kind() + "' artifact, expected '" +
                  kind + "'");
  }
  return c;
}

}  // namespace cyber

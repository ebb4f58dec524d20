#include "cyberevent/embeddings.h"

#include <fstream>
#include <iomanip>

#include "cyberevent/errors.h"

namespace cyber {

std::string_view channel_name(Channel c) {
  switch (c) {
    case Channel::kWord2Vec: return "word2vec";
    case Channel::kGlove: return "glove";
    case Channel::kFastText: return "fasttext";
  }
  return "unknown";
}

Channel parse_channel(std::string_view name) {
  if (name == "word2vec") return Channel::kWord2Vec;
  if (name == "glove") return Channel::kGlove;
  if (name == "fasttext") return Channel::kFastText;
  throw IoError("unknown embedding channel '" + std::string(name) + "'");
}

Container EmbeddingTable::to_container() const {
  Container c("embedding:" + std::string(channel_name(channel)));
  c.put_text("channel", std::string(channel_name(channel)));
  c.put_matrix("vectors", vectors);
  c.put_strings("vocab.tokens", vocab.tokens());
  Eigen::VectorXd counts(static_cast<Eigen::Index>(vocab.size()));
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    counts[static_cast<Eigen::Index>(i)] = static_cast<double>(vocab.count(static_cast<int>(i)));
  }
  c.put_vector("vocab.counts", counts);
  return c;
}

EmbeddingTable EmbeddingTable::from_container(const Container& c) {
  EmbeddingTable t;
  t.channel = parse_channel(c.text("channel"));
  t.vectors = c.matrix("vectors");
  Eigen::VectorXd counts = c.vector("vocab.counts");
  std::vector<std::int64_t> cs(counts.size());
  for (Eigen::Index i = 0; i < counts.size(); ++i) cs[i] = static_cast<std::int64_t>(counts[i]);
  t.vocab = Vocabulary::from_entries(c.strings("vocab.tokens"), cs);
  if (static_cast<std::size_t>(t.vectors.rows()) != t.vocab.size()) {
    throw IoError("embedding table rows do not match its vocabulary");
  }
  return t;
}

void EmbeddingTable::save(const std::string& path) const { to_container().save(path); }

EmbeddingTable EmbeddingTable::load(const std::string& path) {
  return from_container(Container::load(path));
}

void EmbeddingTable::export_text(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << std::setprecision(17);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out << vocab.token(static_cast<int>(i));
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
      out << ' ' << vectors(static_cast<Eigen::Index>(i), j);
    }
    out << '\n';
  }
}

EmbeddingSet::EmbeddingSet(EmbeddingTable word2vec, EmbeddingTable glove,
                           FastTextModel fasttext)
    : word2vec_(std::move(word2vec)),
      glove_(std::move(glove)),
      fasttext_(std::move(fasttext.words)),
      subwords_(std::move(fasttext.subwords)) {
  dim_ = word2vec_.dim();
  if (glove_.dim() != dim_ || fasttext_.dim() != dim_ ||
      (subwords_.rows.rows() > 0 && subwords_.rows.cols() != dim_)) {
    throw ShapeError("embedding channels disagree on dimension");
  }
  if (glove_.vocab.tokens() != word2vec_.vocab.tokens() ||
      fasttext_.vocab.tokens() != word2vec_.vocab.tokens()) {
    throw ShapeError("embedding channels were trained on different vocabularies");
  }
  const auto v = static_cast<Eigen::Index>(vocab().size());
  served_fasttext_ = RowMatrix::Zero(v, dim_);
  for (Eigen::Index w = 1; w < v; ++w) {
    auto rows = subwords_.known_rows(vocab().token(static_cast<int>(w)));
    Eigen::RowVectorXd sum = fasttext_.vectors.row(w);
    for (int r : rows) sum += subwords_.rows.row(r);
    served_fasttext_.row(w) = sum / static_cast<double>(rows.size() + 1);
  }
}

const EmbeddingTable& EmbeddingSet::table(Channel c) const {
  switch (c) {
    case Channel::kWord2Vec: return word2vec_;
    case Channel::kGlove: return glove_;
    case Channel::kFastText: return fasttext_;
  }
  throw ShapeError("unknown channel");
}

Eigen::VectorXd EmbeddingSet::fasttext_vector(std::string_view token,
                                              bool* known) const {
  const int idx = vocab().index(token);
  if (idx > 0) {
    if (known) *known = true;
    return served_fasttext_.row(idx).transpose();
  }
  if (idx == kPadIndex) {
    if (known) *known = false;
    return Eigen::VectorXd::Zero(dim_);
  }
  auto rows = subwords_.known_rows(token);
  if (known) *known = !rows.empty();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
  if (rows.empty()) return v;
  for (int r : rows) v += subwords_.rows.row(r).transpose();
  return v / static_cast<double>(rows.size());
}

TokenStack EmbeddingSet::lookup_stack(std::string_view token) const {
  TokenStack s = TokenStack::Zero(3, dim_);
  const int idx = vocab().index(token);
  if (idx == kPadIndex) return s;
  if (idx > 0) {
    s.row(0) = word2vec_.vectors.row(idx);
    s.row(1) = glove_.vectors.row(idx);
  }
  s.row(2) = fasttext_vector(token).transpose();
  return s;
}

}  // namespace cyber

#include <doctest.h>

#include <random>

#include "../fixture.h"
#include "../oracles.h"
#include "cyberevent/context.h"
#include "cyberevent/crf.h"
#include "cyberevent/errors.h"
#include "cyberevent/ie.h"
#include "cyberevent/lda.h"
#include "cyberevent/meta.h"
#include "cyberevent/ner.h"
#include "temp_dir.h"

using namespace cyber;

namespace {

const fixture::Pipeline& small_pipeline() {
  static const fixture::Pipeline p = [] {
    SynthConfig s;
    s.n = 300;
    return fixture::train_upstream(s, fixture::quick_config());
  }();
  return p;
}

std::vector<TokenStack> low_rank_stacks(int n, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd mix = Eigen::MatrixXd::NullaryExpr(3 * dim, 4, [&] { return g(rng); });
  std::vector<TokenStack> out;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd z = Eigen::VectorXd::NullaryExpr(4, [&] { return g(rng); });
    Eigen::VectorXd flat = mix * z / 2.0;
    out.push_back(Eigen::Map<RowMatrix>(flat.data(), 3, dim));
  }
  return out;
}

}  // namespace

TEST_CASE("meta-encoder shapes and determinism") {
  MetaEncoder enc(100, 8, 3, 4);
  TokenStack zero = TokenStack::Zero(3, 100);
  Eigen::VectorXd a = enc.encode(zero);
  CHECK(a.size() == 100);
  CHECK(a.allFinite());
  CHECK(enc.encode(zero) == a);
  CHECK(enc.reconstruct(zero).rows() == 3);
  CHECK(enc.reconstruct(zero).allFinite());
  CHECK(MetaEncoder(100, 8, 3, 4).encode(zero) == a);
}

TEST_CASE("meta-encoder validation loss halves on low-rank stacks") {
  MetaTrainConfig cfg;
  cfg.epochs = 40;
  cfg.batch_size = 20;
  MetaEncoder m = train_meta_encoder(low_rank_stacks(200, 12, 3), cfg);
  const auto& v = m.history.validation_loss;
  REQUIRE(v.size() == 40);
  CHECK(v.back() < 0.5 * v.front());
  CHECK(m.history.best_epoch >= 1);
}

TEST_CASE("meta-encoder rejects tiny or ragged training sets") {
  MetaTrainConfig cfg;
  CHECK_THROWS_AS(train_meta_encoder(low_rank_stacks(5, 6, 1), cfg), InsufficientDataError);
  auto stacks = low_rank_stacks(20, 6, 1);
  stacks[3] = TokenStack::Zero(3, 7);
  CHECK_THROWS_AS(train_meta_encoder(stacks, cfg), ShapeError);
}

TEST_CASE("meta-encoder checkpoint round trip") {
  MetaEncoder enc(12, 4, 3, 2);
  TempDir dir;
  enc.save(dir.file("meta.bin"));
  MetaEncoder back = MetaEncoder::load(dir.file("meta.bin"));
  TokenStack s = TokenStack::Random(3, 12);
  CHECK(back.encode(s) == enc.encode(s));
}

TEST_CASE("encode_sequence zeroes padding and matches per-token encoding") {
  const auto& p = small_pipeline();
  TokenizedTweet t = tokenize_tweet("x", "hackers stole the database malwarez");
  p.upstream.embeddings->vocab().bind(t);
  PaddedSequence padded = pad_to_max(t, 9);
  RowMatrix seq = encode_sequence(padded, *p.upstream.embeddings, *p.upstream.meta);
  REQUIRE(seq.rows() == 9);
  for (std::size_t r = 0; r < 5; ++r) {
    Eigen::VectorXd want =
        p.upstream.meta->encode(p.upstream.embeddings->lookup_stack(t.tokens[r]));
    CHECK((seq.row(static_cast<Eigen::Index>(r)).transpose() - want).cwiseAbs().maxCoeff() <=
          1e-12);
  }
  CHECK(seq.bottomRows(4).isZero(0.0));
  CHECK(p.upstream.featurizer->sequence(padded).isApprox(seq, 1e-12));
}

TEST_CASE("LDA with one topic and normalized topic rows") {
  const auto& p = small_pipeline();
  const TopicModel& m = p.upstream.context.topics;
  for (Eigen::Index k = 0; k < m.topic_word.rows(); ++k) {
    CHECK(m.topic_word.row(k).sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(m.topic_word.col(0).isZero(0.0));

  LdaConfig one;
  one.num_topics = 1;
  one.sweeps_per_pass = 5;
  TopicModel single = train_lda(tokenize_corpus(p.split.train), m.vocab, one);
  Eigen::VectorXd theta = single.infer({1, 2, 3});
  REQUIRE(theta.size() == 1);
  CHECK(theta(0) == 1.0);
}

TEST_CASE("lda_topic_token is deterministic and empty for all-OOV tweets") {
  const auto& p = small_pipeline();
  const TopicModel& m = p.upstream.context.topics;
  CHECK(lda_topic_token(tokenize_tweet("o", "qqqzx vvvwk"), m).empty());
  CHECK(lda_topic_token(tokenize_tweet("e", ""), m).empty());
  TokenizedTweet t = tokenize_tweet("t", p.split.test.front().text);
  const std::string first = lda_topic_token(t, m);
  CHECK_FALSE(first.empty());
  CHECK(lda_topic_token(t, m) == first);
  CHECK(lda_topic_token(t, TopicModel::from_container(m.to_container())) == first);
}

TEST_CASE("CRF inference matches enumeration on small chains") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 50; ++i) {
    const int len = 1 + static_cast<int>(rng() % 5);
    const int tags = 2 + static_cast<int>(rng() % 3);
    ChainScores s;
    s.emission = Eigen::MatrixXd::NullaryExpr(len, tags, [&] { return u(rng); });
    s.transition = Eigen::MatrixXd::NullaryExpr(tags, tags, [&] { return u(rng); });
    s.start = Eigen::VectorXd::NullaryExpr(tags, [&] { return u(rng); });
    auto bf = oracle::brute_force_chain(s.emission, s.transition, s.start);
    CHECK(log_partition(s) == doctest::Approx(bf.log_z).epsilon(1e-12));
    CHECK(viterbi(s) == bf.best_path);
    CHECK(sequence_score(s, bf.best_path) == doctest::Approx(bf.best_score).epsilon(1e-12));
  }
}

TEST_CASE("CRF objective rises over the first epochs") {
  const auto& p = small_pipeline();
  Gazetteer gaz(p.corpus.gazetteer);
  auto data = distant_label(tokenize_corpus(p.split.train), gaz);
  data.resize(50);
  CrfConfig cfg;
  cfg.epochs = 10;
  std::vector<double> trace;
  NerModel m = train_crf_ner(data, cfg, gaz, &trace);
  REQUIRE(trace.size() == 11);
  CHECK(trace.back() > trace.front());
  for (const auto& seq : data) CHECK(is_valid_bio(m.decode(seq.tokens)));
}

TEST_CASE("CRF trained on a single all-O sequence predicts all O") {
  NerSequence seq{{"nothing", "to", "see", "here"}, {kOutside, kOutside, kOutside, kOutside}};
  NerModel m = train_crf_ner({seq}, CrfConfig());
  CHECK(m.decode(seq.tokens) == seq.tags);
  CHECK(m.decode({"unseen", "words"}) == std::vector<int>{kOutside, kOutside});
}

TEST_CASE("invalid BIO input names the sequence") {
  std::vector<NerSequence> data{{{"fine"}, {kBegin}}, {{"bad", "tags"}, {kOutside, kInside}}};
  CHECK_FALSE(is_valid_bio(data[1].tags));
  try {
    validate_bio(data);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("bad tags") != std::string::npos);
  }
  CHECK_THROWS_AS(train_crf_ner(data, CrfConfig()), DataError);
}

TEST_CASE("BIO files round trip") {
  TempDir dir;
  std::vector<NerSequence> data{{{"zeus", "botnet", "spreads"}, {kBegin, kInside, kOutside}},
                                {{"hi"}, {kOutside}}};
  write_bio(dir.file("x.bio"), data);
  auto back = read_bio(dir.file("x.bio"));
  REQUIRE(back.size() == 2);
  CHECK(back[0].tokens == data[0].tokens);
  CHECK(back[0].tags == data[0].tags);
  CHECK(back[1].tags == data[1].tags);
}

TEST_CASE("gazetteer matches longest phrases first") {
  Gazetteer g({"zeus", "zeus botnet", "sql injection"});
  CHECK(g.match({"the", "zeus", "botnet", "uses", "sql", "injection"}) ==
        std::vector<int>{kOutside, kBegin, kInside, kOutside, kBegin, kInside});
}

TEST_CASE("IE extracts a noun-verb-noun triple") {
  auto triples = ie_extract(tokenize("hackers stole the database"));
  REQUIRE(triples.size() == 1);
  CHECK(triples[0].subject == std::vector<std::string>{"hackers"});
  CHECK(triples[0].relation == std::vector<std::string>{"stole"});
  CHECK(triples[0].object == std::vector<std::string>{"the", "database"});
  CHECK(triples[0].size() == 4);
  CHECK(ie_extract(tokenize("!!!")).empty());
  CHECK(ie_extract(std::vector<std::string>{}).empty());
}

TEST_CASE("IE tokens occur in the tweet in order") {
  const auto& p = small_pipeline();
  for (const auto& raw : p.corpus.tweets) {
    TokenizedTweet t = tokenize_tweet(raw.id, raw.text);
    for (const auto& tr : ie_extract(t)) {
      std::size_t pos = 0;
      for (const auto* part : {&tr.subject, &tr.relation, &tr.object}) {
        for (const auto& tok : *part) {
          auto it = std::find(t.tokens.begin() + static_cast<std::ptrdiff_t>(pos), t.tokens.end(),
                              tok);
          REQUIRE(it != t.tokens.end());
          pos = static_cast<std::size_t>(it - t.tokens.begin()) + 1;
        }
      }
      CHECK(tr.subject_begin < tr.relation_begin);
      CHECK(tr.relation_begin < tr.object_begin);
    }
  }
}

TEST_CASE("contextual embedding follows the averaging rule") {
  const auto& p = small_pipeline();
  const MetaFeaturizer& f = *p.upstream.featurizer;
  const auto& ctx = p.upstream.context;
  auto f_direct = [&](const std::string& t) -> Eigen::VectorXd {
    if (t.empty()) return Eigen::VectorXd::Zero(f.dim());
    return p.upstream.meta->encode(p.upstream.embeddings->lookup_stack(t));
  };

  SUBCASE("no entities or relations gives the topic embedding") {
    TokenizedTweet t = tokenize_tweet("a", "lol");
    ContextualEmbedding e = contextual_encode(t, ctx, f);
    REQUIRE(e.ner_count() + e.ie_count() == 0);
    CHECK((e.vector - f_direct(e.topic_token)).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("all-OOV tweet gives zero") {
    ContextualEmbedding e = contextual_encode(tokenize_tweet("b", "qqqzx vvvwk"), ctx, f);
    CHECK(e.vector.isZero(0.0));
  }
  SUBCASE("random tweets match the brute-force average") {
    for (const auto& raw : p.split.test) {
      TokenizedTweet t = tokenize_tweet(raw.id, raw.text);
      ContextualEmbedding e = contextual_encode(t, ctx, f);
      std::vector<Eigen::VectorXd> parts{f_direct(e.topic_token)};
      for (const auto& x : e.entities) parts.push_back(f_direct(x));
      for (const auto& x : e.relations) parts.push_back(f_direct(x));
      Eigen::VectorXd want = oracle::average_with_denominator(
          parts, f.dim(), e.entities.size() + e.relations.size() + 1);
      CHECK((e.vector - want).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  SUBCASE("the average is bounded by its largest part") {
    for (const auto& raw : p.split.test) {
      ContextualEmbedding e = contextual_encode(tokenize_tweet(raw.id, raw.text), ctx, f);
      double bound = f_direct(e.topic_token).norm();
      for (const auto& x : e.entities) bound = std::max(bound, f_direct(x).norm());
      for (const auto& x : e.relations) bound = std::max(bound, f_direct(x).norm());
      CHECK(e.vector.norm() <= bound + 1e-12);
    }
  }
  SUBCASE("disabled channels contribute nothing") {
    TokenizedTweet t = tokenize_tweet("c", p.split.test.front().text);
    ContextualEmbedding none = contextual_encode(t, ctx, f, AblationSpec{false, false, false});
    CHECK(none.vector.isZero(0.0));
    CHECK(AblationSpec{true, false, true}.name() == "LDA&IE");
    CHECK(AblationSpec{}.name() == "All");
  }
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "../fixture.h"
#include "../oracles.h"
#include "cyberevent/ablation.h"
#include "cyberevent/config.h"
#include "cyberevent/container.h"
#include "cyberevent/errors.h"
#include "cyberevent/gradcheck.h"
#include "cyberevent/metrics.h"
#include "cyberevent/model.h"
#include "cyberevent/synth.h"
#include "cyberevent/tfidf.h"
#include "temp_dir.h"

using namespace cyber;

namespace {

ClassifierConfig small_classifier() {
  ClassifierConfig c;
  c.dim = 6;
  c.filters = 4;
  c.hidden = 5;
  c.epochs = 3;
  c.batch_size = 16;
  return c;
}

EncodedTweet random_tweet(std::mt19937_64& rng, int dim, std::size_t lmax, std::size_t length) {
  std::normal_distribution<double> g(0.0, 1.0);
  EncodedTweet t;
  t.id = "r" + std::to_string(rng());
  t.sequence = RowMatrix::Zero(static_cast<Eigen::Index>(lmax), dim);
  for (std::size_t r = 0; r < length; ++r) {
    for (int c = 0; c < dim; ++c) t.sequence(static_cast<Eigen::Index>(r), c) = g(rng);
  }
  t.length = length;
  t.context = Eigen::VectorXd::NullaryExpr(dim, [&] { return g(rng); });
  t.label = rng() % 2 ? Label::kEvent : Label::kNonEvent;
  return t;
}

}  // namespace

TEST_CASE("CNN on an all-zero input returns ReLU of the biases") {
  ClassifierConfig cfg;  // production sizes
  FusedClassifier m(cfg);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd want(m.cnn_size());
  Eigen::Index k = 0;
  for (Param* p : m.cnn_parameters()) {
    if (p->name.ends_with(".bias")) {
      for (Eigen::Index i = 0; i < p->value.rows(); ++i) {
        p->value(i, 0) = g(rng);
        want(k++) = std::max(0.0, p->value(i, 0));
      }
    }
  }
  REQUIRE(k == 300);
  Eigen::VectorXd out = m.cnn_forward(RowMatrix::Zero(12, cfg.dim), 7);
  CHECK(out.size() == 300);
  CHECK(out == want);
}

TEST_CASE("extra padding never changes the branch outputs") {
  FusedClassifier m(small_classifier());
  std::mt19937_64 rng(2);
  for (std::size_t len : {1, 2, 4, 7}) {
    EncodedTweet t = random_tweet(rng, 6, 8, len);
    EncodedTweet wide = t;
    wide.sequence = RowMatrix::Zero(20, 6);
    wide.sequence.topRows(8) = t.sequence;
    CHECK(m.cnn_forward(wide.sequence, len) == m.cnn_forward(t.sequence, len));
    CHECK(m.bilstm_forward(wide.sequence, len) == m.bilstm_forward(t.sequence, len));
    CHECK(m.probabilities(wide) == m.probabilities(t));
  }
}

TEST_CASE("shape errors and degenerate inputs") {
  FusedClassifier m(small_classifier());
  CHECK_THROWS_AS(m.cnn_forward(RowMatrix::Zero(4, 6), 2), ShapeError);
  CHECK_THROWS_AS(m.bilstm_forward(RowMatrix::Zero(8, 6), 0), DegenerateInputError);
  CHECK(m.bilstm_forward(RowMatrix::Ones(8, 6), 3).size() == 10);
}

TEST_CASE("fusion head arithmetic") {
  FusedClassifier m(small_classifier());
  std::mt19937_64 rng(3);
  EncodedTweet t = random_tweet(rng, 6, 8, 5);

  Eigen::VectorXd x = m.fused_input(t);
  CHECK(x.size() == m.fused_size());
  const auto head = m.head_parameters();
  Eigen::VectorXd manual = head[0]->value * x + head[1]->value.col(0);
  CHECK((m.logits(t) - manual).cwiseAbs().maxCoeff() <= 1e-12);
  Eigen::VectorXd p = m.probabilities(t);
  CHECK(std::abs(p.sum() - 1.0) <= 1e-12);

  for (Param* q : head) q->value.setZero();
  CHECK(m.probabilities(t) == Eigen::Vector2d(0.5, 0.5));
  CHECK(predicted_label(Eigen::Vector2d(0.6, 0.4)) == Label::kEvent);
}

TEST_CASE("classifier checkpoint round trip is bit-identical") {
  std::mt19937_64 rng(4);
  std::vector<EncodedTweet> train, val;
  for (int i = 0; i < 40; ++i) train.push_back(random_tweet(rng, 6, 8, 1 + rng() % 8));
  for (int i = 0; i < 10; ++i) val.push_back(random_tweet(rng, 6, 8, 1 + rng() % 8));
  TrainState st = train_classifier(train, val, small_classifier());
  st.max_length = 8;
  TempDir dir;
  st.save(dir.file("model.bin"));
  TrainState back = TrainState::load(dir.file("model.bin"));
  CHECK(back.best_epoch == st.best_epoch);
  CHECK(back.max_length == 8);
  CHECK(back.history.size() == st.history.size());
  for (const auto& t : val) CHECK(back.model.probabilities(t) == st.model.probabilities(t));
  CHECK(back.to_container().serialize() == st.to_container().serialize());
}

TEST_CASE("random labels give chance-level validation accuracy") {
  std::mt19937_64 rng(5);
  std::vector<EncodedTweet> train, val;
  for (int i = 0; i < 400; ++i) train.push_back(random_tweet(rng, 6, 8, 1 + rng() % 8));
  for (int i = 0; i < 400; ++i) val.push_back(random_tweet(rng, 6, 8, 1 + rng() % 8));
  TrainState st = train_classifier(train, val, small_classifier());
  std::vector<RawTweet> gold;
  for (const auto& t : val) gold.push_back({t.id, "", {}, t.label});
  const double acc = evaluate(predict_encoded(st.model, val), gold).accuracy;
  CHECK(acc >= 0.4);
  CHECK(acc <= 0.6);
}

TEST_CASE("training rejects single-class data") {
  std::mt19937_64 rng(6);
  std::vector<EncodedTweet> train;
  for (int i = 0; i < 10; ++i) {
    train.push_back(random_tweet(rng, 6, 8, 3));
    train.back().label = Label::kEvent;
  }
  CHECK_THROWS_AS(train_classifier(train, train, small_classifier()), DataError);
  CHECK_THROWS_AS(train_classifier({}, train, small_classifier()), DataError);
}

TEST_CASE("fusion head gradients agree with finite differences") {
  CHECK(gradcheck_fusion(2, 10).passed());
}

TEST_CASE("metrics on perfect and one-class predictions") {
  std::vector<Label> gold{Label::kEvent, Label::kNonEvent, Label::kEvent, Label::kNonEvent};
  MetricsReport perfect = compute_metrics(gold, gold);
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);

  std::vector<Label> all_non(4, Label::kNonEvent);
  MetricsReport flat = compute_metrics(all_non, gold);
  CHECK(flat.accuracy == 0.5);
  CHECK(flat.precision == 0.0);
  CHECK(flat.precision_undefined);
  CHECK(flat.recall == 0.0);

  CHECK_THROWS_AS(compute_metrics(all_non, std::vector<Label>(3, Label::kEvent)), AlignmentError);
}

TEST_CASE("metrics agree with a brute-force counter") {
  std::mt19937_64 rng(7);
  std::vector<Label> pred, gold;
  std::vector<int> p_int, g_int;
  for (int i = 0; i < 200; ++i) {
    p_int.push_back(static_cast<int>(rng() % 2));
    g_int.push_back(static_cast<int>(rng() % 2));
    pred.push_back(static_cast<Label>(p_int.back()));
    gold.push_back(static_cast<Label>(g_int.back()));
  }
  oracle::Counts c = oracle::count_pairs(p_int, g_int);
  MetricsReport r = compute_metrics(pred, gold);
  CHECK(r.confusion.tp == c.tp);
  CHECK(r.confusion.fp == c.fp);
  CHECK(r.confusion.tn == c.tn);
  CHECK(r.confusion.fn == c.fn);
  const double precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  const double recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  CHECK(r.accuracy == doctest::Approx(static_cast<double>(c.tp + c.tn) / 200.0));
  CHECK(r.f1 == doctest::Approx(2 * precision * recall / (precision + recall)));
}

TEST_CASE("evaluate aligns by id and refuses mismatches") {
  std::vector<RawTweet> gold{{"a", "", {}, Label::kEvent}, {"b", "", {}, Label::kNonEvent}};
  std::vector<Prediction> preds{{"b", Label::kNonEvent, 0.1}, {"a", Label::kEvent, 0.9}};
  CHECK(evaluate(preds, gold).accuracy == 1.0);
  CHECK_THROWS_AS(evaluate({{"a", Label::kEvent, 0.9}, {"c", Label::kEvent, 0.9}}, gold),
                  AlignmentError);
  CHECK_THROWS_AS(evaluate({{"a", Label::kEvent, 0.9}, {"a", Label::kEvent, 0.9}}, gold),
                  AlignmentError);
  CHECK_THROWS_AS(evaluate({{"a", Label::kEvent, 0.9}}, gold), AlignmentError);

  TempDir dir;
  write_predictions(dir.file("p.jsonl"), preds);
  auto back = read_predictions(dir.file("p.jsonl"));
  REQUIRE(back.size() == 2);
  CHECK(back[1].id == "a");
  CHECK(back[1].p_event == 0.9);
}

TEST_CASE("TF-IDF weights follow tf times log(N/df)") {
  TfidfVectorizer v;
  v.fit({{"a", "b"}, {"a", "c"}, {"d"}});
  auto w = v.weights({"a", "a", "b", "zzz"});
  CHECK(w.at("a") == doctest::Approx(2 * std::log(3.0 / 2.0)));
  CHECK(w.at("b") == doctest::Approx(std::log(3.0)));
  CHECK(w.count("zzz") == 0);
  CHECK(v.idf("a b") == doctest::Approx(std::log(3.0)));
  CHECK(v.transform({"a", "b"}).norm() == doctest::Approx(1.0));
}

TEST_CASE("TF-IDF baseline with a single word predicts the majority class") {
  DatasetSplit split;
  for (int i = 0; i < 10; ++i) {
    split.train.push_back({"t" + std::to_string(i), "hello", {}, i < 6 ? Label::kEvent : Label::kNonEvent});
  }
  for (int i = 0; i < 10; ++i) {
    split.test.push_back({"s" + std::to_string(i), "hello", {}, i < 7 ? Label::kEvent : Label::kNonEvent});
  }
  CHECK(baseline_tfidf_linear(split).metrics.accuracy == doctest::Approx(0.7));
}

TEST_CASE("TF-IDF baseline separates a planted corpus") {
  SynthConfig s;
  s.n = 600;
  DatasetSplit split = split_dataset(generate_synthetic(s).tweets, SplitRatios(), 1);
  CHECK(baseline_tfidf_linear(split).metrics.accuracy >= 0.9);
}

TEST_CASE("synthetic corpus balance, determinism and planted entities") {
  SynthConfig s;
  s.n = 1000;
  SynthCorpus a = generate_synthetic(s);
  REQUIRE(a.tweets.size() == 1000);
  int events = 0;
  for (const auto& t : a.tweets) events += t.label == Label::kEvent;
  CHECK(std::abs(events - 500) <= 1);
  CHECK(generate_synthetic(s).tweets == a.tweets);

  for (const auto& t : a.tweets) {
    if (t.label != Label::kEvent) continue;
    bool hit = false;
    for (const auto& e : a.gazetteer) hit = hit || oracle::contains_phrase(t.text, e);
    CHECK_MESSAGE(hit, t.text);
  }
  s.n = 5;
  CHECK_THROWS_AS(generate_synthetic(s), ConfigError);
  s.n = 100;
  s.signal_rate = 1.5;
  CHECK_THROWS_AS(generate_synthetic(s), ConfigError);
}

TEST_CASE("ablation emits the seven rows in table order") {
  SynthConfig s;
  s.n = 300;
  fixture::Pipeline p = fixture::train_upstream(s, fixture::quick_config());
  AblationHeadConfig head;
  head.epochs = 2;
  AblationTable t = run_ablation(p.split, p.upstream, standard_ablation_specs(), {1, 2}, head);
  std::vector<std::string> names;
  for (const auto& r : t.rows) {
    names.push_back(r.name);
    CHECK(r.accuracy.size() == 2);
  }
  CHECK(names == std::vector<std::string>{"All", "NER&LDA", "LDA&IE", "NER&IE", "IE", "NER", "LDA"});
  CHECK(t.to_text().find("NER&IE") != std::string::npos);
}

TEST_CASE("configuration parsing") {
  PipelineConfig c = parse_config("[general]\nseed = 9\nvector_size = 50\n"
                                  "[glove]\nno_components = 50\n[lda]\nnum_topics = 12\n");
  CHECK(c.seed == 9);
  CHECK(c.vector_size == 50);
  CHECK(c.lda.num_topics == 12);
  CHECK(parse_config(c.to_ini()).to_ini() == c.to_ini());
  CHECK_THROWS_AS(parse_config("[general]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[glove]\nno_components = 7\n"), ConfigError);
}

TEST_CASE("container round trip and kind check") {
  Container c("demo");
  c.put_matrix("m", RowMatrix(RowMatrix::Random(3, 2)));
  c.put_strings("s", {"x", "", "✓"});
  c.put_text("t", "hello");
  Container back = Container::deserialize(c.serialize());
  CHECK(back.kind() == "demo");
  CHECK(back.matrix("m") == c.matrix("m"));
  CHECK(back.strings("s") == c.strings("s"));
  CHECK(back.text("t") == "hello");
  TempDir dir;
  c.save(dir.file("c.bin"));
  CHECK_THROWS_AS(Container::load(dir.file("c.bin"), "other"), IoError);
  CHECK_THROWS_AS(Container::deserialize("garbage"), IoError);
}

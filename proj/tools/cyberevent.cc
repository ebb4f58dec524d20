// Command-line front end. Every subcommand writes its artifacts plus a
// <name>.manifest.json next to them; the manifest is marked incomplete until
// the subcommand finishes.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cyberevent/ablation.h"
#include "cyberevent/config.h"
#include "cyberevent/errors.h"
#include "cyberevent/gradcheck.h"
#include "cyberevent/langid.h"
#include "cyberevent/manifest.h"
#include "cyberevent/pipeline.h"
#include "cyberevent/report.h"
#include "cyberevent/synth.h"
#include "cyberevent/tfidf.h"

namespace fs = std::filesystem;
using namespace cyber;

namespace {

struct Globals {
  std::string config_path;
  bool desk_scale = false;
  std::optional<std::uint64_t> seed;
  std::string log_level = "info";
  std::string workdir = "run";
};

// Artifact locations, defaulting to fixed names under the work directory.
struct Paths {
  std::string data, embeddings, meta, context, model, reports;
  void resolve(const std::string& workdir) {
    auto def = [&](std::string& p, const char* name) {
      if (p.empty()) p = (fs::path(workdir) / name).string();
    };
    def(data, "data");
    def(embeddings, "embeddings");
    def(meta, "meta.bin");
    def(context, "context");
    def(model, "model.bin");
    def(reports, "reports");
  }
};

PipelineConfig effective_config(const Globals& g) {
  PipelineConfig c = g.config_path.empty() ? PipelineConfig() : load_config(g.config_path);
  if (g.seed) c.seed = *g.seed;
  c.propagate();
  if (g.desk_scale || c.desk_scale) c.apply_desk_scale();
  return c;
}

std::vector<RawTweet> load_tweets(const std::string& path, RunManifest& manifest) {
  manifest.add_input(path);
  LoadResult r = load_jsonl(path);
  if (r.skipped) spdlog::warn("{}: skipped {} malformed lines", path, r.skipped);
  return r.tweets;
}

DatasetSplit load_split(const std::string& dir, RunManifest& manifest) {
  DatasetSplit s;
  s.train = load_tweets(dir + "/train.jsonl", manifest);
  s.validation = load_tweets(dir + "/validation.jsonl", manifest);
  s.test = load_tweets(dir + "/test.jsonl", manifest);
  return s;
}

Upstream load_upstream(const Paths& p, RunManifest& manifest) {
  for (const char* f : {"/word2vec.bin", "/glove.bin", "/fasttext.bin"}) {
    manifest.add_input(p.embeddings + f);
  }
  manifest.add_input(p.meta);
  manifest.add_input(p.context + "/topics.bin");
  manifest.add_input(p.context + "/ner.bin");
  Upstream up;
  up.embeddings = std::make_shared<const EmbeddingSet>(load_embedding_set(p.embeddings));
  up.meta = std::make_shared<const MetaEncoder>(MetaEncoder::load(p.meta));
  up.context = load_context(p.context);
  up.bind();
  return up;
}

void ensure_parent(const std::string& path) {
  auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::string manifest_for(const std::string& artifact, const std::string& sub) {
  fs::path p(artifact);
  if (fs::is_directory(p) || !p.has_extension()) return (p / (sub + ".manifest.json")).string();
  return (p.parent_path() / (sub + ".manifest.json")).string();
}

// Runs `body` between manifest begin and complete/fail.
int guarded(RunManifest& manifest, const PipelineConfig& config,
            const std::function<void()>& body) {
  manifest.set_config(config.to_ini());
  manifest.set_seed("seed", config.seed);
  try {
    manifest.begin();
    body();
    manifest.complete();
    return 0;
  } catch (const std::exception& e) {
    try {
      manifest.fail(e.what());
    } catch (const std::exception&) {
    }
    throw;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cyber-security event detection from short noisy text"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_flag("--desk-scale", g.desk_scale, "Shrink hash tables, sweeps and epochs for CI");
  app.add_option("--seed", g.seed, "Override the configured seed");
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
  app.add_option("--workdir", g.workdir, "Default location of all artifacts");
  Paths paths;

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a planted-signal labeled corpus");
  SynthConfig sc;
  std::string synth_out, gaz_out;
  bool no_entity = false, no_relation = false, no_topic = false;
  synth->add_option("--n", sc.n, "Number of tweets")->capture_default_str();
  synth->add_option("--event-fraction", sc.event_fraction)->capture_default_str();
  synth->add_option("--signal-rate", sc.signal_rate,
                    "Per-tweet probability that an enabled channel is planted")
      ->capture_default_str();
  synth->add_flag("--no-entity-signal", no_entity);
  synth->add_flag("--no-relation-signal", no_relation);
  synth->add_flag("--no-topic-signal", no_topic);
  synth->add_option("--out", synth_out, "Output JSONL")->required();
  synth->add_option("--gazetteer-out", gaz_out, "Write the planted entity phrases here");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load, filter and split a JSONL corpus");
  std::string ingest_in, seeds_path;
  bool filter_seeds = false, filter_lang = false;
  ingest->add_option("--input", ingest_in)->required()->check(CLI::ExistingFile);
  ingest->add_option("--out", paths.data, "Split directory (default <workdir>/data)");
  ingest->add_flag("--filter-seeds", filter_seeds, "Keep tweets matching a seed keyword");
  ingest->add_option("--seeds", seeds_path, "Seed keyword file")->check(CLI::ExistingFile);
  ingest->add_flag("--filter-english", filter_lang, "Keep tweets identified as English");

  // train-embeddings
  auto* temb = app.add_subcommand("train-embeddings", "Train word2vec, GloVe and fastText");
  std::string corpus_path;
  temb->add_option("--corpus", corpus_path, "JSONL corpus (default <data>/train.jsonl)");
  temb->add_option("--data", paths.data);
  temb->add_option("--out", paths.embeddings);

  // train-meta
  auto* tmeta = app.add_subcommand("train-meta", "Train the convolutional meta-encoder");
  tmeta->add_option("--embeddings", paths.embeddings);
  tmeta->add_option("--out", paths.meta);

  // train-context
  auto* tctx = app.add_subcommand("train-context", "Train the topic model and NER tagger");
  std::string gazetteer_path, bio_path;
  tctx->add_option("--corpus", corpus_path, "JSONL corpus (default <data>/train.jsonl)");
  tctx->add_option("--data", paths.data);
  tctx->add_option("--embeddings", paths.embeddings);
  tctx->add_option("--gazetteer", gazetteer_path, "Entity phrases for distant labels")
      ->check(CLI::ExistingFile);
  tctx->add_option("--seeds", seeds_path, "Seed keywords for a derived gazetteer")
      ->check(CLI::ExistingFile);
  tctx->add_option("--bio", bio_path, "BIO-labeled NER training file")->check(CLI::ExistingFile);
  tctx->add_option("--out", paths.context);

  // train-model
  auto* tmodel = app.add_subcommand("train-model", "Train the fused classifier");
  for (auto* sub : {tmodel}) {
    sub->add_option("--data", paths.data);
    sub->add_option("--embeddings", paths.embeddings);
    sub->add_option("--meta", paths.meta);
    sub->add_option("--context", paths.context);
    sub->add_option("--out", paths.model);
  }
  bool plots = false;
  tmodel->add_flag("--plots", plots, "Write SVG training curves");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score the model and the TF-IDF baseline");
  std::string pred_path, gold_path;
  eval->add_option("--data", paths.data);
  eval->add_option("--embeddings", paths.embeddings);
  eval->add_option("--meta", paths.meta);
  eval->add_option("--context", paths.context);
  eval->add_option("--model", paths.model);
  eval->add_option("--out", paths.reports);
  eval->add_option("--predictions", pred_path, "Score this prediction file instead")
      ->check(CLI::ExistingFile);
  eval->add_option("--gold", gold_path, "Gold JSONL for --predictions")->check(CLI::ExistingFile);
  eval->add_flag("--plots", plots, "Write SVG charts");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Contextual channel ablation table");
  std::vector<std::uint64_t> ablation_seeds{1, 2, 3, 4, 5};
  ablate->add_option("--data", paths.data);
  ablate->add_option("--embeddings", paths.embeddings);
  ablate->add_option("--meta", paths.meta);
  ablate->add_option("--context", paths.context);
  ablate->add_option("--out", paths.reports);
  ablate->add_option("--seeds", ablation_seeds, "Head seeds")->delimiter(',');
  ablate->add_flag("--plots", plots, "Write an SVG bar chart");

  // predict
  auto* predict = app.add_subcommand("predict", "Classify tweets");
  std::string predict_in, predict_text_arg, predict_out;
  predict->add_option("--embeddings", paths.embeddings);
  predict->add_option("--meta", paths.meta);
  predict->add_option("--context", paths.context);
  predict->add_option("--model", paths.model);
  auto* in_opt = predict->add_option("--input", predict_in, "JSONL tweets")
                     ->check(CLI::ExistingFile);
  auto* text_opt =
      predict->add_option("--text", predict_text_arg, "A single tweet")->excludes(in_opt);
  predict->add_option("--out", predict_out, "Prediction JSONL (default stdout)");

  // gradcheck
  auto* grad = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  bool grad_all = false;
  std::vector<std::string> components;
  int samples = 20;
  grad->add_flag("--all", grad_all, "Check every component");
  grad->add_option("--component", components, "cnn, lstm, meta, crf, fusion")
      ->check(CLI::IsMember({"cnn", "lstm", "meta", "crf", "fusion"}));
  grad->add_option("--samples", samples, "Entries per parameter tensor")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  auto logger = spdlog::stderr_color_mt("cyberevent");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(g.log_level));
  paths.resolve(g.workdir);

  try {
    const PipelineConfig config = effective_config(g);

    if (synth->parsed()) {
      sc.seed = config.seed;
      sc.entity_signal = !no_entity;
      sc.relation_signal = !no_relation;
      sc.topic_signal = !no_topic;
      ensure_parent(synth_out);
      RunManifest m(manifest_for(synth_out, "synth"), "synth");
      m.set_argument("n", std::to_string(sc.n));
      m.set_argument("signal_rate", fmt::format("{}", sc.signal_rate));
      return guarded(m, config, [&] {
        m.add_output(synth_out);
        SynthCorpus corpus = generate_synthetic(sc);
        write_jsonl(synth_out, corpus.tweets);
        if (!gaz_out.empty()) {
          m.add_output(gaz_out);
          ensure_parent(gaz_out);
          Gazetteer(corpus.gazetteer).save(gaz_out);
        }
        spdlog::info("wrote {} tweets to {}", corpus.tweets.size(), synth_out);
      });
    }

    if (ingest->parsed()) {
      fs::create_directories(paths.data);
      RunManifest m(manifest_for(paths.data, "ingest"), "ingest");
      return guarded(m, config, [&] {
        auto tweets = load_tweets(ingest_in, m);
        if (filter_seeds) {
          SeedKeywordSet seeds =
              seeds_path.empty() ? SeedKeywordSet::defaults() : SeedKeywordSet::load(seeds_path);
          if (!seeds_path.empty()) m.add_input(seeds_path);
          tweets = filter_seed_keywords(tweets, seeds);
        }
        if (filter_lang) tweets = filter_english(tweets, LanguageIdentifier::with_bundled_corpora());
        DatasetSplit split = split_dataset(tweets, config.split, config.seed);
        for (const auto& [name, part] :
             {std::pair{"train", &split.train}, std::pair{"validation", &split.validation},
              std::pair{"test", &split.test}}) {
          const std::string out = paths.data + "/" + name + ".jsonl";
          m.add_output(out);
          write_jsonl(out, *part);
        }
        spdlog::info("split {} tweets: {} train, {} validation, {} test", tweets.size(),
                     split.train.size(), split.validation.size(), split.test.size());
      });
    }

    if (temb->parsed()) {
      if (corpus_path.empty()) corpus_path = paths.data + "/train.jsonl";
      fs::create_directories(paths.embeddings);
      RunManifest m(manifest_for(paths.embeddings, "train-embeddings"), "train-embeddings");
      return guarded(m, config, [&] {
        auto corpus = tokenize_corpus(load_tweets(corpus_path, m));
        for (const char* f : {"/word2vec.bin", "/glove.bin", "/fasttext.bin"}) {
          m.add_output(paths.embeddings + f);
        }
        save_embedding_set(paths.embeddings, train_embedding_set(corpus, config));
      });
    }

    if (tmeta->parsed()) {
      ensure_parent(paths.meta);
      RunManifest m(manifest_for(paths.meta, "train-meta"), "train-meta");
      return guarded(m, config, [&] {
        for (const char* f : {"/word2vec.bin", "/glove.bin", "/fasttext.bin"}) {
          m.add_input(paths.embeddings + f);
        }
        m.add_output(paths.meta);
        MetaEncoder enc = train_meta(load_embedding_set(paths.embeddings), config);
        enc.save(paths.meta);
        spdlog::info("meta-encoder best epoch {} (validation MSE {:.6g})", enc.history.best_epoch,
                     enc.history.validation_loss.empty()
                         ? 0.0
                         : enc.history.validation_loss[static_cast<std::size_t>(
                               enc.history.best_epoch - 1)]);
      });
    }

    if (tctx->parsed()) {
      if (corpus_path.empty()) corpus_path = paths.data + "/train.jsonl";
      fs::create_directories(paths.context);
      RunManifest m(manifest_for(paths.context, "train-context"), "train-context");
      return guarded(m, config, [&] {
        auto corpus = tokenize_corpus(load_tweets(corpus_path, m));
        m.add_input(paths.embeddings + "/word2vec.bin");
        Vocabulary vocab = EmbeddingTable::load(paths.embeddings + "/word2vec.bin").vocab;
        Gazetteer gaz;
        if (!gazetteer_path.empty()) {
          m.add_input(gazetteer_path);
          gaz = Gazetteer::load(gazetteer_path);
        } else {
          SeedKeywordSet seeds =
              seeds_path.empty() ? SeedKeywordSet::defaults() : SeedKeywordSet::load(seeds_path);
          if (!seeds_path.empty()) m.add_input(seeds_path);
          gaz = Gazetteer::from_seeds(corpus, seeds, config.min_count);
        }
        std::vector<NerSequence> bio;
        if (!bio_path.empty()) {
          m.add_input(bio_path);
          bio = read_bio(bio_path);
        }
        m.add_output(paths.context + "/topics.bin");
        m.add_output(paths.context + "/ner.bin");
        ContextModels models =
            train_context(corpus, vocab, config, gaz, bio_path.empty() ? nullptr : &bio);
        save_context(paths.context, models);
      });
    }

    if (tmodel->parsed()) {
      ensure_parent(paths.model);
      RunManifest m(manifest_for(paths.model, "train-model"), "train-model");
      return guarded(m, config, [&] {
        DatasetSplit split = load_split(paths.data, m);
        Upstream up = load_upstream(paths, m);
        const std::size_t max_len = compute_max_length(tokenize_corpus(split.train), config);
        auto train = encode_tweets(split.train, max_len, up);
        auto val = encode_tweets(split.validation, max_len, up);
        m.add_output(paths.model);
        TrainState st = train_classifier(train, val, config.classifier);
        st.max_length = max_len;
        st.save(paths.model);
        if (plots) {
          const std::string svg = fs::path(paths.model).replace_extension(".curves.svg").string();
          m.add_output(svg);
          Series loss{"train loss", {}}, acc{"validation accuracy", {}}, f1{"validation F1", {}};
          for (const auto& r : st.history) {
            loss.values.push_back(r.train_loss);
            acc.values.push_back(r.validation_accuracy);
            f1.values.push_back(r.validation_f1);
          }
          write_text_file(svg, line_chart_svg("Classifier training", {loss, acc, f1}));
        }
        spdlog::info("best epoch {}", st.best_epoch);
      });
    }

    if (eval->parsed()) {
      fs::create_directories(paths.reports);
      RunManifest m(manifest_for(paths.reports, "evaluate"), "evaluate");
      return guarded(m, config, [&] {
        if (!pred_path.empty()) {
          if (gold_path.empty()) throw ConfigError("--predictions needs --gold");
          auto preds = read_predictions(pred_path);
          m.add_input(pred_path);
          MetricsReport r = evaluate(preds, load_tweets(gold_path, m));
          const std::string out = paths.reports + "/metrics.json";
          m.add_output(out);
          write_text_file(out, r.to_json() + "\n");
          std::cout << metrics_table({{"predictions", r}});
          return;
        }
        DatasetSplit split = load_split(paths.data, m);
        Upstream up = load_upstream(paths, m);
        m.add_input(paths.model);
        TrainState st = TrainState::load(paths.model);
        auto test = encode_tweets(split.test, st.max_length, up);
        auto preds = predict_encoded(st.model, test);
        MetricsReport model_m = evaluate(preds, split.test);
        model_m.fingerprint = sha256_hex(config.to_ini()).substr(0, 16);
        BaselineResult base = baseline_tfidf_linear(split);
        base.metrics.fingerprint = model_m.fingerprint;

        const std::string pred_out = paths.reports + "/predictions.jsonl";
        const std::string metrics_out = paths.reports + "/metrics.json";
        const std::string table_out = paths.reports + "/metrics.txt";
        for (const auto& p : {pred_out, metrics_out, table_out}) m.add_output(p);
        write_predictions(pred_out, preds);
        write_text_file(metrics_out, "{\n\"model\": " + model_m.to_json() +
                                         ",\n\"tfidf_baseline\": " + base.metrics.to_json() +
                                         "\n}\n");
        const std::string table = metrics_table({{"fused model", model_m},
                                                 {"tf-idf baseline", base.metrics}});
        write_text_file(table_out, table);
        if (plots) {
          const std::string svg = paths.reports + "/accuracy.svg";
          m.add_output(svg);
          write_text_file(svg, bar_chart_svg("Test accuracy",
                                             {{"fused", model_m.accuracy},
                                              {"tf-idf", base.metrics.accuracy}}));
        }
        std::cout << table;
      });
    }

    if (ablate->parsed()) {
      fs::create_directories(paths.reports);
      RunManifest m(manifest_for(paths.reports, "ablate"), "ablate");
      for (std::size_t i = 0; i < ablation_seeds.size(); ++i) {
        m.set_seed("head_seed_" + std::to_string(i), ablation_seeds[i]);
      }
      return guarded(m, config, [&] {
        DatasetSplit split = load_split(paths.data, m);
        Upstream up = load_upstream(paths, m);
        AblationTable t = run_ablation(split, up, standard_ablation_specs(), ablation_seeds);
        const std::string txt = paths.reports + "/ablation.txt";
        const std::string json = paths.reports + "/ablation.json";
        m.add_output(txt);
        m.add_output(json);
        write_text_file(txt, t.to_text());
        write_text_file(json, t.to_json() + "\n");
        if (plots) {
          m.add_output(paths.reports + "/ablation.svg");
          write_text_file(paths.reports + "/ablation.svg", ablation_svg(t));
        }
        std::cout << t.to_text();
      });
    }

    if (predict->parsed()) {
      if (predict_in.empty() && text_opt->count() == 0) {
        throw ConfigError("predict needs --input or --text");
      }
      const std::string mpath = predict_out.empty()
                                    ? (fs::path(paths.reports) / "predict.manifest.json").string()
                                    : manifest_for(predict_out, "predict");
      RunManifest m(mpath, "predict");
      return guarded(m, config, [&] {
        Upstream up = load_upstream(paths, m);
        m.add_input(paths.model);
        TrainState st = TrainState::load(paths.model);
        std::vector<RawTweet> tweets;
        if (!predict_in.empty()) {
          tweets = load_tweets(predict_in, m);
        } else {
          tweets.push_back({"cli-1", predict_text_arg, std::nullopt, std::nullopt});
        }
        std::vector<Prediction> preds;
        for (const auto& t : tweets) preds.push_back(predict_text(t.id, t.text, st, up));
        if (predict_out.empty()) {
          for (const auto& p : preds) {
            std::cout << fmt::format("{{\"id\":\"{}\",\"label\":\"{}\",\"p_event\":{}}}\n", p.id,
                                     label_name(p.label), p.p_event);
          }
        } else {
          ensure_parent(predict_out);
          m.add_output(predict_out);
          write_predictions(predict_out, preds);
        }
      });
    }

    if (grad->parsed()) {
      if (!grad_all && components.empty()) throw ConfigError("gradcheck needs --all or --component");
      GradcheckReport report;
      const std::vector<std::string> all{"cnn", "lstm", "meta", "crf", "fusion"};
      for (const auto& c : grad_all ? all : components) {
        if (c == "cnn") report.append(gradcheck_cnn(config.seed, samples));
        if (c == "lstm") report.append(gradcheck_lstm(config.seed, samples));
        if (c == "meta") report.append(gradcheck_meta(config.seed, samples));
        if (c == "crf") report.append(gradcheck_crf(config.seed, samples));
        if (c == "fusion") report.append(gradcheck_fusion(config.seed, samples));
      }
      std::cout << report.to_text();
      std::cout << (report.passed() ? "gradcheck: all components within tolerance\n"
                                    : "gradcheck: FAILED\n");
      return report.passed() ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

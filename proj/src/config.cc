#include "cyberevent/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "cyberevent/errors.h"

namespace cyber {
namespace {

namespace pt = boost::property_tree;

const std::set<std::string> kKnownKeys{
    "general.vector_size", "general.seed", "general.min_count", "general.max_length_floor",
    "lda.num_topics", "lda.update_every", "lda.chunksize", "lda.passes", "lda.sweeps",
    "lda.alpha", "lda.beta", "word2vec.window_size", "word2vec.min_count", "word2vec.iter",
    "word2vec.alpha", "word2vec.negative", "fasttext.window_size", "fasttext.iter",
    "fasttext.alpha", "fasttext.negative", "fasttext.min_n", "fasttext.max_n",
    "fasttext.bucket", "glove.window_size", "glove.no_components", "glove.learning_rate",
    "glove.epoch_num", "glove.x_max", "autoencoder.nb_epoch", "autoencoder.batch_size",
    "autoencoder.shuffle", "autoencoder.validation_split", "autoencoder.learning_rate",
    "autoencoder.filters", "autoencoder.kernel", "crf.learning_rate", "crf.l2", "crf.epochs",
    "classifier.filters", "classifier.widths", "classifier.hidden",
    "classifier.learning_rate", "classifier.epochs", "classifier.batch_size",
    "classifier.dropout", "classifier.class_weights", "split.train", "split.validation",
    "split.test"};

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "True" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "False" || v == "0" || v == "no") return false;
  throw ConfigError("expected a boolean, got '" + v + "'");
}

template <typename T>
void get(const pt::ptree& tree, const std::string& key, T& out) {
  auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.'));
  if (!v) return;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      out = parse_bool(*v);
    } else {
      out = boost::lexical_cast<T>(*v);
    }
  } catch (const boost::bad_lexical_cast&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + *v + "'");
  }
}

}  // namespace

void PipelineConfig::propagate() {
  word2vec.dim = fasttext.dim = glove.dim = classifier.dim = vector_size;
  word2vec.seed = seed;
  fasttext.seed = seed + 1;
  glove.seed = seed + 2;
  meta.seed = seed + 3;
  lda.seed = seed + 4;
  crf.seed = seed + 5;
  classifier.seed = seed + 6;
}

void PipelineConfig::apply_desk_scale() {
  desk_scale = true;
  fasttext.buckets = 1u << 16;
  lda.sweeps_per_pass = 50;
  meta.epochs = std::min(meta.epochs, 50);
  crf.epochs = std::min(crf.epochs, 10);
  classifier.epochs = std::min(classifier.epochs, 5);
}

std::string PipelineConfig::to_ini() const {
  std::string widths;
  for (int w : classifier.widths) widths += (widths.empty() ? "" : ",") + std::to_string(w);
  std::ostringstream o;
  o << "[general]\n"
    << fmt::format("vector_size = {}\nseed = {}\nmin_count = {}\nmax_length_floor = {}\n"
                   "desk_scale = {}\n\n",
                   vector_size, seed, min_count, max_length_floor, desk_scale)
    << "[lda]\n"
    << fmt::format("num_topics = {}\nupdate_every = {}\nchunksize = {}\npasses = {}\n"
                   "sweeps = {}\nalpha = {}\nbeta = {}\n\n",
                   lda.num_topics, lda.update_every, lda.chunksize, lda.passes,
                   lda.sweeps_per_pass, lda.alpha, lda.beta)
    << "[word2vec]\n"
    << fmt::format("window_size = {}\nmin_count = {}\niter = {}\nalpha = {}\nnegative = {}\n\n",
                   word2vec.window, min_count, word2vec.iters, word2vec.alpha,
                   word2vec.negatives)
    << "[fasttext]\n"
    << fmt::format("window_size = {}\niter = {}\nalpha = {}\nnegative = {}\nmin_n = {}\n"
                   "max_n = {}\nbucket = {}\n\n",
                   fasttext.window, fasttext.iters, fasttext.alpha, fasttext.negatives,
                   fasttext.min_n, fasttext.max_n, fasttext.buckets)
    << "[glove]\n"
    << fmt::format("window_size = {}\nno_components = {}\nlearning_rate = {}\nepoch_num = {}\n"
                   "x_max = {}\n\n",
                   glove.window, glove.dim, glove.learning_rate, glove.epochs, glove.x_max)
    << "[autoencoder]\n"
    << fmt::format("nb_epoch = {}\nbatch_size = {}\nshuffle = {}\nvalidation_split = {}\n"
                   "learning_rate = {}\nfilters = {}\nkernel = {}\n\n",
                   meta.epochs, meta.batch_size, meta.shuffle, meta.validation_split,
                   meta.learning_rate, meta_filters, meta_kernel)
    << "[crf]\n"
    << fmt::format("learning_rate = {}\nl2 = {}\nepochs = {}\n\n", crf.learning_rate, crf.l2,
                   crf.epochs)
    << "[classifier]\n"
    << fmt::format("filters = {}\nwidths = {}\nhidden = {}\nlearning_rate = {}\nepochs = {}\n"
                   "batch_size = {}\ndropout = {}\nclass_weights = {}\n\n",
                   classifier.filters, widths, classifier.hidden, classifier.learning_rate,
                   classifier.epochs, classifier.batch_size, classifier.dropout,
                   classifier.class_weights)
    << "[split]\n"
    << fmt::format("train = {}\nvalidation = {}\ntest = {}\n", split.train, split.validation,
                   split.test);
  return o.str();
}

PipelineConfig parse_config(const std::string& ini_text) {
  pt::ptree tree;
  std::istringstream in(ini_text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (!kKnownKeys.count(full) && full != "general.desk_scale") {
        throw ConfigError("config: unknown key '" + full + "'");
      }
    }
  }
  PipelineConfig c;
  get(tree, "general.vector_size", c.vector_size);
  get(tree, "general.seed", c.seed);
  get(tree, "general.min_count", c.min_count);
  get(tree, "word2vec.min_count", c.min_count);
  get(tree, "general.max_length_floor", c.max_length_floor);

  get(tree, "lda.num_topics", c.lda.num_topics);
  get(tree, "lda.update_every", c.lda.update_every);
  get(tree, "lda.chunksize", c.lda.chunksize);
  get(tree, "lda.passes", c.lda.passes);
  get(tree, "lda.sweeps", c.lda.sweeps_per_pass);
  get(tree, "lda.alpha", c.lda.alpha);
  get(tree, "lda.beta", c.lda.beta);

  get(tree, "word2vec.window_size", c.word2vec.window);
  get(tree, "word2vec.iter", c.word2vec.iters);
  get(tree, "word2vec.alpha", c.word2vec.alpha);
  get(tree, "word2vec.negative", c.word2vec.negatives);
  get(tree, "fasttext.window_size", c.fasttext.window);
  get(tree, "fasttext.iter", c.fasttext.iters);
  get(tree, "fasttext.alpha", c.fasttext.alpha);
  get(tree, "fasttext.negative", c.fasttext.negatives);
  get(tree, "fasttext.min_n", c.fasttext.min_n);
  get(tree, "fasttext.max_n", c.fasttext.max_n);
  get(tree, "fasttext.bucket", c.fasttext.buckets);

  get(tree, "glove.window_size", c.glove.window);
  int components = c.vector_size;
  get(tree, "glove.no_components", components);
  if (components != c.vector_size) {
    throw ConfigError("config: glove.no_components must equal general.vector_size");
  }
  get(tree, "glove.learning_rate", c.glove.learning_rate);
  get(tree, "glove.epoch_num", c.glove.epochs);
  get(tree, "glove.x_max", c.glove.x_max);

  get(tree, "autoencoder.nb_epoch", c.meta.epochs);
  get(tree, "autoencoder.batch_size", c.meta.batch_size);
  get(tree, "autoencoder.shuffle", c.meta.shuffle);
  get(tree, "autoencoder.validation_split", c.meta.validation_split);
  get(tree, "autoencoder.learning_rate", c.meta.learning_rate);
  get(tree, "autoencoder.filters", c.meta_filters);
  get(tree, "autoencoder.kernel", c.meta_kernel);

  get(tree, "crf.learning_rate", c.crf.learning_rate);
  get(tree, "crf.l2", c.crf.l2);
  get(tree, "crf.epochs", c.crf.epochs);

  get(tree, "classifier.filters", c.classifier.filters);
  std::string widths;
  get(tree, "classifier.widths", widths);
  if (!widths.empty()) {
    c.classifier.widths.clear();
    std::istringstream ws(widths);
    std::string w;
    while (std::getline(ws, w, ',')) {
      try {
        c.classifier.widths.push_back(std::stoi(w));
      } catch (const std::exception&) {
        throw ConfigError("config: bad classifier width '" + w + "'");
      }
    }
  }
  get(tree, "classifier.hidden", c.classifier.hidden);
  get(tree, "classifier.learning_rate", c.classifier.learning_rate);
  get(tree, "classifier.epochs", c.classifier.epochs);
  get(tree, "classifier.batch_size", c.classifier.batch_size);
  get(tree, "classifier.dropout", c.classifier.dropout);
  get(tree, "classifier.class_weights", c.classifier.class_weights);

  get(tree, "split.train", c.split.train);
  get(tree, "split.validation", c.split.validation);
  get(tree, "split.test", c.split.test);

  bool desk = false;
  get(tree, "general.desk_scale", desk);
  c.propagate();
  if (desk) c.apply_desk_scale();
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace cyber

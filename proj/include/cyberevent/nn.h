#pragma once

// Minimal dense-layer toolkit with hand-written backward passes. Everything
// is 64-bit and single-threaded so gradient checks and reruns are exact.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cyberevent/container.h"

namespace cyber {

struct Param {
  std::string name;
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad;

  Param() = default;
  Param(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)),
        value(Eigen::MatrixXd::Zero(rows, cols)),
        grad(Eigen::MatrixXd::Zero(rows, cols)) {}

  void zero_grad() { grad.setZero(); }
};

using ParamList = std::vector<Param*>;

void zero_grads(const ParamList& params);
void write_params(Container& c, const ParamList& params);
void read_params(const Container& c, const ParamList& params);

// Fills with U(-bound, bound) drawn from rng.
void init_uniform(Param& p, double bound, std::mt19937_64& rng);
// Glorot-uniform for a layer with the given fan-in / fan-out.
void init_glorot(Param& p, Eigen::Index fan_in, Eigen::Index fan_out,
                 std::mt19937_64& rng);

// 1-D convolution over a batch stored as channels x (length * batch); sample
// b occupies columns [b*length, (b+1)*length). With same padding the output
// length equals the input length (odd kernels only); otherwise the output has
// length - kernel + 1 positions per sample.
class Conv1d {
 public:
  struct Cache {
    Eigen::MatrixXd cols;
    Eigen::Index length = 0;
  };

  Conv1d() = default;
  Conv1d(const std::string& name, int in_channels, int out_channels, int kernel,
         bool same_padding);

  int in_channels() const { return in_; }
  int out_channels() const { return out_; }
  int kernel() const { return kernel_; }
  Eigen::Index output_length(Eigen::Index length) const;

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Eigen::Index length,
                          Cache* cache) const;
  // Accumulates parameter gradients; returns d(loss)/d(x) when wanted.
  Eigen::MatrixXd backward(const Eigen::MatrixXd& dout, const Cache& cache,
                           bool want_input_grad);

  void init(std::mt19937_64& rng);
  ParamList parameters() { return {&weight_, &bias_}; }
  const Param& weight() const { return weight_; }
  const Param& bias() const { return bias_; }

 private:
  int in_ = 0, out_ = 0, kernel_ = 1;
  bool same_ = false;
  Param weight_;  // out x (kernel * in), column index = k * in + c
  Param bias_;    // out x 1
};

class Dense {
 public:
  Dense() = default;
  Dense(const std::string& name, int in, int out);

  // x: in x batch.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd backward(const Eigen::MatrixXd& dout, const Eigen::MatrixXd& x,
                           bool want_input_grad);

  void init(std::mt19937_64& rng);
  ParamList parameters() { return {&weight_, &bias_}; }
  const Param& weight() const { return weight_; }
  const Param& bias() const { return bias_; }
  Param& weight() { return weight_; }
  Param& bias() { return bias_; }
  int in() const { return static_cast<int>(weight_.value.cols()); }
  int out() const { return static_cast<int>(weight_.value.rows()); }

 private:
  Param weight_;
  Param bias_;
};

// Single-layer LSTM cell, gate order (input, forget, candidate, output).
class Lstm {
 public:
  struct Cache {
    Eigen::MatrixXd x;      // D x T inputs in processing order
    Eigen::MatrixXd gates;  // 4H x T activated gates
    Eigen::MatrixXd c;      // H x (T+1), column 0 = initial state
    Eigen::MatrixXd h;      // H x (T+1)
  };

  Lstm() = default;
  Lstm(const std::string& name, int input, int hidden);

  int hidden() const { return hidden_; }
  // Runs over the columns of x in order; returns the final hidden state.
  Eigen::VectorXd forward(const Eigen::MatrixXd& x, Cache* cache) const;
  // Backpropagates d(loss)/d(final hidden) through time.
  void backward(const Eigen::VectorXd& dh_final, const Cache& cache);

  void init(std::mt19937_64& rng);
  ParamList parameters() { return {&wx_, &wh_, &b_}; }

 private:
  int input_ = 0, hidden_ = 0;
  Param wx_;  // 4H x D
  Param wh_;  // 4H x H
  Param b_;   // 4H x 1
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam(ParamList params, AdamConfig config);
  void step();
  long steps() const { return t_; }

  void write(Container& c, const std::string& prefix) const;
  void read(const Container& c, const std::string& prefix);

 private:
  ParamList params_;
  AdamConfig config_;
  std::vector<Eigen::MatrixXd> m_, v_;
  long t_ = 0;
};

void sgd_step(const ParamList& params, double learning_rate);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Numerically stable softmax of a logit vector.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

}  // namespace cyber

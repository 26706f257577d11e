//
// Copyright 2026 The trajaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Small fully connected networks with hand-written backpropagation and Adam.
// Batches are Eigen matrices holding one sample per column.

#ifndef TRAJAUDIT_NEURAL_H_
#define TRAJAUDIT_NEURAL_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace trajaudit {

class RecordReader;

enum class Activation { kIdentity, kTanh };

std::string to_string(Activation activation);
Activation parse_activation(const std::string& text);

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out

  friend bool operator==(const DenseLayer& a, const DenseLayer& b) {
    return a.weights.rows() == b.weights.rows() &&
           a.weights.cols() == b.weights.cols() && a.weights == b.weights &&
           a.bias == b.bias;
  }
};

// Hidden layers use tanh; the output layer uses `output_activation`
// (identity for critics, tanh for policies so actions stay in (-1, 1)).
class Mlp {
 public:
  Mlp() = default;
  // Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  Mlp(std::vector<std::size_t> layer_sizes, Activation output_activation,
      std::uint64_t seed);
  static Mlp zeros(std::vector<std::size_t> layer_sizes,
                   Activation output_activation);

  const std::vector<std::size_t>& layer_sizes() const { return layer_sizes_; }
  std::size_t input_size() const { return layer_sizes_.front(); }
  std::size_t output_size() const { return layer_sizes_.back(); }
  Activation output_activation() const { return output_activation_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::size_t parameter_count() const;
  bool all_finite() const;

  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  std::vector<std::size_t> layer_sizes_;
  Activation output_activation_ = Activation::kIdentity;
  std::vector<DenseLayer> layers_;
};

struct MlpGradients {
  std::vector<DenseLayer> layers;
  double loss = 0.0;
};

// Loss = mean over the batch of ||f(x) - y||^2, and its exact gradient with
// respect to every weight and bias.
MlpGradients mlp_gradient(const Mlp& net, const Eigen::MatrixXd& inputs,
                          const Eigen::MatrixXd& targets);
double mean_squared_error(const Mlp& net, const Eigen::MatrixXd& inputs,
                          const Eigen::MatrixXd& targets);

struct AdamState {
  AdamState() = default;
  explicit AdamState(const Mlp& net, double learning_rate = 1e-3);

  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  std::vector<DenseLayer> first_moment;
  std::vector<DenseLayer> second_moment;
};

// One bias-corrected Adam step: theta -= lr * m_hat / (sqrt(v_hat) + eps).
void adam_update(AdamState& state, Mlp& net, const MlpGradients& gradients);

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  double lr = 1e-3;
  // Learning rate halves every this many epochs; 0 disables decay.
  std::size_t lr_decay_every = 0;
  std::uint64_t seed = 0;
};

double learning_rate_at(const TrainConfig& config, std::size_t epoch);

// Visits the sample indices in seeded shuffled minibatches, epoch by epoch.
class MinibatchSchedule {
 public:
  MinibatchSchedule(std::size_t samples, std::size_t batch_size,
                    std::uint64_t seed);
  // Reshuffles and returns the batches of the next epoch.
  const std::vector<std::vector<std::size_t>>& next_epoch();

 private:
  std::size_t batch_size_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<std::size_t>> batches_;
  std::uint64_t seed_;
  std::uint64_t epoch_ = 0;
};

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& source,
                               const std::vector<std::size_t>& columns);

// Minibatch Adam on MSE. Deterministic given config.seed; epochs == 0
// returns `net` untouched. InvalidArgument on empty or mismatched data.
Mlp train_regression(Mlp net, const Eigen::MatrixXd& inputs,
                     const Eigen::MatrixXd& targets, const TrainConfig& config);

// Text records:
//   trajaudit-mlp 1
//   layers <count> <sizes...>
//   output identity|tanh
//   W <layer> <rows> <cols> <row-major values>
//   b <layer> <size> <values>
void write_mlp(const Mlp& net, std::ostream& out);
Mlp read_mlp(RecordReader& reader);

}  // namespace trajaudit

#endif  // TRAJAUDIT_NEURAL_H_

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

#include "trajaudit/neural.h"

#include <cmath>
#include <numeric>
#include <ostream>

#include "trajaudit/error.h"
#include "trajaudit/rng.h"
#include "trajaudit/text_records.h"

namespace trajaudit {
namespace {

void check_sizes(const std::vector<std::size_t>& sizes) {
  if (sizes.size() < 2) throw InvalidArgument("mlp: need at least input and output sizes");
  for (std::size_t s : sizes) {
    if (s == 0) throw InvalidArgument("mlp: layer sizes must be positive");
  }
}

void apply_activation(Activation activation, Eigen::MatrixXd& values) {
  if (activation == Activation::kTanh) values = values.array().tanh();
}

// Derivative expressed through the activation output.
Eigen::ArrayXXd activation_slope(Activation activation,
                                 const Eigen::MatrixXd& outputs) {
  if (activation == Activation::kTanh) return 1.0 - outputs.array().square();
  return Eigen::ArrayXXd::Ones(outputs.rows(), outputs.cols());
}

void check_batch(const Mlp& net, const Eigen::MatrixXd& inputs,
                 const Eigen::MatrixXd& targets) {
  if (static_cast<std::size_t>(inputs.rows()) != net.input_size()) {
    throw InvalidArgument("mlp: input has " + std::to_string(inputs.rows()) +
                          " rows, network expects " +
                          std::to_string(net.input_size()));
  }
  if (static_cast<std::size_t>(targets.rows()) != net.output_size() ||
      targets.cols() != inputs.cols()) {
    throw InvalidArgument("mlp: target shape does not match network output");
  }
  if (inputs.cols() == 0) throw InvalidArgument("mlp: empty batch");
}

}  // namespace

std::string to_string(Activation activation) {
  return activation == Activation::kTanh ? "tanh" : "identity";
}

Activation parse_activation(const std::string& text) {
  if (text == "tanh") return Activation::kTanh;
  if (text == "identity") return Activation::kIdentity;
  throw InvalidArgument("unknown activation '" + text + "'");
}

Mlp::Mlp(std::vector<std::size_t> layer_sizes, Activation output_activation,
         std::uint64_t seed)
    : Mlp(zeros(std::move(layer_sizes), output_activation)) {
  Rng rng(seed);
  for (auto& layer : layers_) {
    const double fan_in = static_cast<double>(layer.weights.cols());
    const double fan_out = static_cast<double>(layer.weights.rows());
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
        layer.weights(r, c) = rng.uniform(-limit, limit);
      }
    }
  }
}

Mlp Mlp::zeros(std::vector<std::size_t> layer_sizes,
               Activation output_activation) {
  check_sizes(layer_sizes);
  Mlp net;
  net.output_activation_ = output_activation;
  for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
    const auto rows = static_cast<Eigen::Index>(layer_sizes[i + 1]);
    const auto cols = static_cast<Eigen::Index>(layer_sizes[i]);
    net.layers_.push_back(
        {Eigen::MatrixXd::Zero(rows, cols), Eigen::VectorXd::Zero(rows)});
  }
  net.layer_sizes_ = std::move(layer_sizes);
  return net;
}

std::size_t Mlp::parameter_count() const {
  std::size_t count = 0;
  for (const auto& layer : layers_) {
    count += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
  }
  return count;
}

bool Mlp::all_finite() const {
  for (const auto& layer : layers_) {
    if (!layer.weights.allFinite() || !layer.bias.allFinite()) return false;
  }
  return true;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& input) const {
  return forward_batch(input);
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& inputs) const {
  if (static_cast<std::size_t>(inputs.rows()) != input_size()) {
    throw InvalidArgument("mlp: input has " + std::to_string(inputs.rows()) +
                          " rows, network expects " + std::to_string(input_size()));
  }
  Eigen::MatrixXd activations = inputs;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    Eigen::MatrixXd z = layer.weights * activations;
    z.colwise() += layer.bias;
    const bool last = l + 1 == layers_.size();
    apply_activation(last ? output_activation_ : Activation::kTanh, z);
    activations = std::move(z);
  }
  return activations;
}

MlpGradients mlp_gradient(const Mlp& net, const Eigen::MatrixXd& inputs,
                          const Eigen::MatrixXd& targets) {
  check_batch(net, inputs, targets);
  const auto& layers = net.layers();
  const std::size_t depth = layers.size();

  // activations[0] is the input; activations[l + 1] is layer l's output.
  std::vector<Eigen::MatrixXd> activations(depth + 1);
  activations[0] = inputs;
  for (std::size_t l = 0; l < depth; ++l) {
    Eigen::MatrixXd z = layers[l].weights * activations[l];
    z.colwise() += layers[l].bias;
    apply_activation(l + 1 == depth ? net.output_activation() : Activation::kTanh, z);
    activations[l + 1] = std::move(z);
  }

  const double batch = static_cast<double>(inputs.cols());
  const Eigen::MatrixXd residual = activations[depth] - targets;
  MlpGradients gradients;
  gradients.loss = residual.squaredNorm() / batch;
  gradients.layers.resize(depth);

  Eigen::MatrixXd delta =
      ((2.0 / batch) * residual.array() *
       activation_slope(net.output_activation(), activations[depth]))
          .matrix();
  for (std::size_t l = depth; l-- > 0;) {
    gradients.layers[l].weights = delta * activations[l].transpose();
    gradients.layers[l].bias = delta.rowwise().sum();
    if (l > 0) {
      delta = ((layers[l].weights.transpose() * delta).array() *
               activation_slope(Activation::kTanh, activations[l]))
                  .matrix();
    }
  }
  return gradients;
}

double mean_squared_error(const Mlp& net, const Eigen::MatrixXd& inputs,
                          const Eigen::MatrixXd& targets) {
  check_batch(net, inputs, targets);
  return (net.forward_batch(inputs) - targets).squaredNorm() /
         static_cast<double>(inputs.cols());
}

AdamState::AdamState(const Mlp& net, double learning_rate) : lr(learning_rate) {
  for (const auto& layer : net.layers()) {
    DenseLayer zero{Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()),
                    Eigen::VectorXd::Zero(layer.bias.size())};
    first_moment.push_back(zero);
    second_moment.push_back(std::move(zero));
  }
}

void adam_update(AdamState& state, Mlp& net, const MlpGradients& gradients) {
  auto& layers = net.layers();
  if (gradients.layers.size() != layers.size() ||
      state.first_moment.size() != layers.size()) {
    throw InvalidArgument("adam_update: layer count mismatch");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);

  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = state.beta1 * m + (1.0 - state.beta1) * grad;
    v = state.beta2 * v + (1.0 - state.beta2) * grad.cwiseProduct(grad);
    param.array() -= state.lr * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + state.epsilon);
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const DenseLayer& grad = gradients.layers[l];
    if (grad.weights.rows() != layers[l].weights.rows() ||
        grad.weights.cols() != layers[l].weights.cols() ||
        grad.bias.size() != layers[l].bias.size()) {
      throw InvalidArgument("adam_update: gradient shape mismatch");
    }
    update(layers[l].weights, grad.weights, state.first_moment[l].weights,
           state.second_moment[l].weights);
    update(layers[l].bias, grad.bias, state.first_moment[l].bias,
           state.second_moment[l].bias);
  }
}

double learning_rate_at(const TrainConfig& config, std::size_t epoch) {
  if (config.lr_decay_every == 0) return config.lr;
  return config.lr * std::pow(0.5, static_cast<double>(epoch / config.lr_decay_every));
}

MinibatchSchedule::MinibatchSchedule(std::size_t samples, std::size_t batch_size,
                                     std::uint64_t seed)
    : batch_size_(batch_size), order_(samples), seed_(seed) {
  if (samples == 0) throw InvalidArgument("minibatch schedule: no samples");
  if (batch_size == 0) throw InvalidArgument("minibatch schedule: batch_size must be >= 1");
  std::iota(order_.begin(), order_.end(), std::size_t{0});
}

const std::vector<std::vector<std::size_t>>& MinibatchSchedule::next_epoch() {
  Rng rng(derive_seed(seed_, epoch_++));
  for (std::size_t i = order_.size(); i > 1; --i) {
    std::swap(order_[i - 1], order_[rng.below(i)]);
  }
  batches_.clear();
  for (std::size_t start = 0; start < order_.size(); start += batch_size_) {
    const std::size_t end = std::min(order_.size(), start + batch_size_);
    batches_.emplace_back(order_.begin() + start, order_.begin() + end);
  }
  return batches_;
}

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& source,
                               const std::vector<std::size_t>& columns) {
  Eigen::MatrixXd out(source.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) =
        source.col(static_cast<Eigen::Index>(columns[i]));
  }
  return out;
}

Mlp train_regression(Mlp net, const Eigen::MatrixXd& inputs,
                     const Eigen::MatrixXd& targets, const TrainConfig& config) {
  if (inputs.cols() == 0) throw InvalidArgument("train_regression: empty data");
  check_batch(net, inputs, targets);
  if (config.epochs == 0) return net;

  AdamState adam(net, config.lr);
  MinibatchSchedule schedule(static_cast<std::size_t>(inputs.cols()),
                             config.batch_size, config.seed);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    adam.lr = learning_rate_at(config, epoch);
    for (const auto& batch : schedule.next_epoch()) {
      const MlpGradients grads = mlp_gradient(net, gather_columns(inputs, batch),
                                              gather_columns(targets, batch));
      adam_update(adam, net, grads);
    }
  }
  if (!net.all_finite()) throw Error("train_regression: parameters diverged");
  return net;
}

void write_mlp(const Mlp& net, std::ostream& out) {
  out << "trajaudit-mlp 1\n";
  out << "layers " << net.layer_sizes().size();
  for (std::size_t s : net.layer_sizes()) out << ' ' << s;
  out << "\noutput " << to_string(net.output_activation()) << '\n';
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    const DenseLayer& layer = net.layers()[l];
    out << "W " << l << ' ' << layer.weights.rows() << ' ' << layer.weights.cols();
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
        out << ' ' << format_real(layer.weights(r, c));
      }
    }
    out << "\nb " << l << ' ' << layer.bias.size();
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) {
      out << ' ' << format_real(layer.bias(r));
    }
    out << '\n';
  }
}

Mlp read_mlp(RecordReader& reader) {
  Record magic = reader.expect("trajaudit-mlp");
  reader.expect_size(magic, 2);
  if (reader.unsigned_integer(magic, 1) != 1) reader.fail(magic, "unsupported mlp version");

  Record layers = reader.expect("layers");
  const std::size_t count = reader.unsigned_integer(layers, 1);
  reader.expect_size(layers, 2 + count);
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < count; ++i) sizes.push_back(reader.unsigned_integer(layers, 2 + i));
  if (count < 2) reader.fail(layers, "need at least two layer sizes");
  for (std::size_t s : sizes) {
    if (s == 0) reader.fail(layers, "layer sizes must be positive");
  }

  Record output = reader.expect("output");
  reader.expect_size(output, 2);
  Activation activation = Activation::kIdentity;
  try {
    activation = parse_activation(output.tokens[1]);
  } catch (const InvalidArgument& e) {
    reader.fail(output, e.what());
  }

  Mlp net = Mlp::zeros(sizes, activation);
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    DenseLayer& layer = net.layers()[l];
    Record w = reader.expect("W");
    const auto rows = static_cast<std::size_t>(layer.weights.rows());
    const auto cols = static_cast<std::size_t>(layer.weights.cols());
    if (w.size() < 4 || reader.unsigned_integer(w, 1) != l ||
        reader.unsigned_integer(w, 2) != rows || reader.unsigned_integer(w, 3) != cols) {
      reader.fail(w, "weight record does not match layer " + std::to_string(l));
    }
    reader.expect_size(w, 4 + rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        layer.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            reader.real(w, 4 + r * cols + c);
      }
    }
    Record b = reader.expect("b");
    if (b.size() < 3 || reader.unsigned_integer(b, 1) != l ||
        reader.unsigned_integer(b, 2) != rows) {
      reader.fail(b, "bias record does not match layer " + std::to_string(l));
    }
    reader.expect_size(b, 3 + rows);
    for (std::size_t r = 0; r < rows; ++r) {
      layer.bias(static_cast<Eigen::Index>(r)) = reader.real(b, 3 + r);
    }
  }
  return net;
}

}  // namespace trajaudit

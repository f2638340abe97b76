/*
 * Copyright 2026 The shapx Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "shapx/core.hpp"

namespace shapx {

enum class Activation { relu, elu };

inline std::string_view to_string(Activation a) { return a == Activation::relu ? "relu" : "elu"; }
inline Activation activation_from_string(std::string_view s) {
  if (s == "relu") return Activation::relu;
  if (s == "elu") return Activation::elu;
  throw ArgumentError("unknown activation '" + std::string(s) + "'");
}

/// Fully connected feedforward network. Hidden layers apply the activation; the output layer
/// is affine (no squashing). Inputs and outputs are column-major batches: one column per item.
template <typename Scalar>
class Mlp {
 public:
  using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Layer {
    MatrixX weight;  // out x in
    VectorX bias;
  };
  using Gradients = std::vector<Layer>;

  /// Cached pre-activations and layer inputs of one forward pass.
  struct Tape {
    std::vector<MatrixX> inputs;
    std::vector<MatrixX> pre;
  };

  Mlp() = default;

  /// Zero-initialized network with the given layer widths (input first, output last).
  Mlp(std::vector<int> widths, Activation activation) : widths_(std::move(widths)), activation_(activation) {
    if (widths_.size() < 2) throw ArgumentError("Mlp: need at least input and output widths");
    for (int w : widths_) {
      if (w < 1) throw ArgumentError("Mlp: layer widths must be positive");
    }
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
      layers_.push_back({MatrixX::Zero(widths_[l + 1], widths_[l]), VectorX::Zero(widths_[l + 1])});
    }
  }

  /// Uniform fan-in initialization U(-gain/sqrt(in), gain/sqrt(in)), biases zero.
  static Mlp initialized(std::vector<int> widths, Activation activation, RandomSource& rng, Scalar gain = Scalar(1)) {
    Mlp net(std::move(widths), activation);
    for (auto& layer : net.layers_) {
      const Scalar bound = gain / std::sqrt(static_cast<Scalar>(layer.weight.cols()));
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
          layer.weight(r, c) = static_cast<Scalar>((2.0 * rng.uniform() - 1.0)) * bound;
        }
      }
    }
    return net;
  }

  const std::vector<int>& widths() const { return widths_; }
  Activation activation() const { return activation_; }
  int input_width() const { return widths_.front(); }
  int output_width() const { return widths_.back(); }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }

  MatrixX forward(const MatrixX& X) const {
    check_input(X.rows());
    MatrixX h = X;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      MatrixX z = layers_[l].weight * h;
      z.colwise() += layers_[l].bias;
      h = (l + 1 < layers_.size()) ? activate(z) : std::move(z);
    }
    return h;
  }

  VectorX forward(const VectorX& x) const { return forward(MatrixX(x)).col(0); }

  MatrixX forward(const MatrixX& X, Tape& tape) const {
    check_input(X.rows());
    tape.inputs.clear();
    tape.pre.clear();
    MatrixX h = X;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      tape.inputs.push_back(h);
      MatrixX z = layers_[l].weight * h;
      z.colwise() += layers_[l].bias;
      tape.pre.push_back(z);
      h = (l + 1 < layers_.size()) ? activate(z) : std::move(z);
    }
    return h;
  }

  /// Parameter gradients given dLoss/dOutput (same shape as the forward output).
  Gradients backward(const Tape& tape, const MatrixX& grad_out) const {
    Gradients grads(layers_.size());
    MatrixX delta = grad_out;
    for (std::size_t l = layers_.size(); l-- > 0;) {
      if (l + 1 < layers_.size()) delta = delta.cwiseProduct(activate_derivative(tape.pre[l]));
      grads[l].weight = delta * tape.inputs[l].transpose();
      grads[l].bias = delta.rowwise().sum();
      if (l > 0) delta = layers_[l].weight.transpose() * delta;
    }
    return grads;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers_) n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
    return n;
  }

  /// Parameters in layer order; each layer contributes its weight (column-major) then bias.
  static VectorX flatten(const std::vector<Layer>& layers) {
    Eigen::Index n = 0;
    for (const auto& layer : layers) n += layer.weight.size() + layer.bias.size();
    VectorX flat(n);
    Eigen::Index k = 0;
    for (const auto& layer : layers) {
      flat.segment(k, layer.weight.size()) = Eigen::Map<const VectorX>(layer.weight.data(), layer.weight.size());
      k += layer.weight.size();
      flat.segment(k, layer.bias.size()) = layer.bias;
      k += layer.bias.size();
    }
    return flat;
  }

  VectorX parameters() const { return flatten(layers_); }

  void set_parameters(const VectorX& flat) {
    if (static_cast<std::size_t>(flat.size()) != parameter_count()) {
      throw ArgumentError("Mlp::set_parameters: expected " + std::to_string(parameter_count()) + " values");
    }
    Eigen::Index k = 0;
    for (auto& layer : layers_) {
      Eigen::Map<VectorX>(layer.weight.data(), layer.weight.size()) = flat.segment(k, layer.weight.size());
      k += layer.weight.size();
      layer.bias = flat.segment(k, layer.bias.size());
      k += layer.bias.size();
    }
  }

  bool all_finite() const {
    for (const auto& layer : layers_) {
      if (!layer.weight.allFinite() || !layer.bias.allFinite()) return false;
    }
    return true;
  }

 private:
  void check_input(Eigen::Index rows) const {
    if (layers_.empty()) throw ArgumentError("Mlp: network has no layers");
    if (rows != widths_.front()) {
      throw ArgumentError("Mlp: input has " + std::to_string(rows) + " features, expected " +
                          std::to_string(widths_.front()));
    }
  }

  MatrixX activate(const MatrixX& z) const {
    if (activation_ == Activation::relu) return z.cwiseMax(Scalar(0));
    return z.unaryExpr([](Scalar v) { return v > Scalar(0) ? v : std::expm1(v); });
  }

  MatrixX activate_derivative(const MatrixX& z) const {
    if (activation_ == Activation::relu) {
      return z.unaryExpr([](Scalar v) { return v > Scalar(0) ? Scalar(1) : Scalar(0); });
    }
    return z.unaryExpr([](Scalar v) { return v > Scalar(0) ? Scalar(1) : std::exp(v); });
  }

  std::vector<int> widths_;
  Activation activation_ = Activation::relu;
  std::vector<Layer> layers_;
};

enum class OptimizerKind { sgd, adamw };

inline std::string_view to_string(OptimizerKind k) { return k == OptimizerKind::sgd ? "sgd" : "adamw"; }
inline OptimizerKind optimizer_from_string(std::string_view s) {
  if (s == "sgd") return OptimizerKind::sgd;
  if (s == "adam" || s == "adamw") return OptimizerKind::adamw;
  throw ArgumentError("unknown optimizer '" + std::string(s) + "'");
}

/// Plain gradient descent or Adam moment estimation with decoupled weight decay.
template <typename Scalar>
class Optimizer {
 public:
  using Net = Mlp<Scalar>;

  explicit Optimizer(OptimizerKind kind, Scalar weight_decay = Scalar(0), Scalar beta1 = Scalar(0.9),
                     Scalar beta2 = Scalar(0.999), Scalar epsilon = Scalar(1e-8))
      : kind_(kind), weight_decay_(weight_decay), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

  void step(Net& net, const typename Net::Gradients& grads, Scalar learning_rate) {
    auto& layers = net.layers();
    if (kind_ == OptimizerKind::sgd) {
      for (std::size_t l = 0; l < layers.size(); ++l) {
        layers[l].weight -= learning_rate * grads[l].weight;
        layers[l].bias -= learning_rate * grads[l].bias;
      }
      return;
    }
    if (first_.empty()) {
      for (const auto& layer : layers) {
        first_.push_back({Net::MatrixX::Zero(layer.weight.rows(), layer.weight.cols()), Net::VectorX::Zero(layer.bias.size())});
      }
      second_ = first_;
    }
    ++steps_;
    const Scalar c1 = Scalar(1) - std::pow(beta1_, static_cast<Scalar>(steps_));
    const Scalar c2 = Scalar(1) - std::pow(beta2_, static_cast<Scalar>(steps_));
    auto update = [&](auto& param, const auto& grad, auto& m, auto& v, bool decay) {
      m = beta1_ * m + (Scalar(1) - beta1_) * grad;
      v = beta2_ * v + (Scalar(1) - beta2_) * grad.cwiseAbs2();
      if (decay && weight_decay_ > Scalar(0)) param *= (Scalar(1) - learning_rate * weight_decay_);
      param.array() -= learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + epsilon_);
    };
    for (std::size_t l = 0; l < layers.size(); ++l) {
      update(layers[l].weight, grads[l].weight, first_[l].weight, second_[l].weight, true);
      update(layers[l].bias, grads[l].bias, first_[l].bias, second_[l].bias, false);
    }
  }

  OptimizerKind kind() const { return kind_; }
  long steps() const { return steps_; }

 private:
  OptimizerKind kind_;
  Scalar weight_decay_;
  Scalar beta1_;
  Scalar beta2_;
  Scalar epsilon_;
  long steps_ = 0;
  std::vector<typename Net::Layer> first_;
  std::vector<typename Net::Layer> second_;
};

}  // namespace shapx

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

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "shapx/core.hpp"
#include "shapx/mlp.hpp"

namespace shapx {

enum class ModelKind { linear, logistic, mlp };

std::string_view to_string(ModelKind k);
ModelKind model_kind_from_string(std::string_view s);

/// A trained tabular predictor f: R^f -> R^K.
///   linear:   W x + b (raw scores; K = 1 for regression)
///   logistic: softmax(W x + b)
///   mlp:      softmax(net(x))
class TabularModel {
 public:
  static TabularModel linear(Matrix weights, Vector bias);
  static TabularModel logistic(Matrix weights, Vector bias);
  static TabularModel mlp(Mlp<double> network);

  ModelKind kind() const { return kind_; }
  int input_width() const { return input_width_; }
  int classes() const { return classes_; }

  Vector predict(const Vector& x) const;
  /// One row per input, one column per class.
  Matrix predict_batch(const Matrix& rows) const;
  int predicted_class(const Vector& x) const;

  const Matrix& weights() const { return weights_; }
  const Vector& bias() const { return bias_; }
  const Mlp<double>& network() const { return network_; }

  std::map<std::string, std::string>& metadata() { return metadata_; }
  const std::map<std::string, std::string>& metadata() const { return metadata_; }

 private:
  ModelKind kind_ = ModelKind::linear;
  int input_width_ = 0;
  int classes_ = 0;
  Matrix weights_;
  Vector bias_;
  Mlp<double> network_;
  std::map<std::string, std::string> metadata_;
};

enum class BaselineKind { zeros, training_mean, fixed };

/// Replacement values for features outside S: the masked input is x on S, baseline off S.
struct MaskingRule {
  BaselineKind kind = BaselineKind::zeros;
  Vector baseline;  // populated for training_mean and fixed

  static MaskingRule zeros() { return {}; }
  static MaskingRule training_mean(const Matrix& rows);
  static MaskingRule fixed(Vector baseline);

  Vector baseline_for(int width) const;
  Vector apply(const Vector& x, const FeatureSubset& s) const;
};

/// v(S) = f(masked x)[cls].
CoalitionGame masked_game(std::shared_ptr<const TabularModel> model, const Vector& x, int cls,
                          const MaskingRule& rule = MaskingRule::zeros());
CoalitionGame masked_game(const TabularModel& model, const Vector& x, int cls,
                          const MaskingRule& rule = MaskingRule::zeros());

/// phi_i = w_i (x_i - baseline_i).
Attribution linear_model_shapley(const Vector& weights, double bias, const Vector& x, const Vector& baseline);
Attribution linear_model_shapley(const Vector& weights, double bias, const Vector& x);

// ---------------------------------------------------------------------------
// Datasets
// ---------------------------------------------------------------------------

struct TabularDataset {
  std::vector<std::string> feature_names;
  std::string label_name;
  Matrix features;  // rows x f
  Vector labels;

  int rows() const { return static_cast<int>(features.rows()); }
  int width() const { return static_cast<int>(features.cols()); }
};

/// CSV with a header row; `label_column` names the label, every other column is a numeric
/// feature. Missing or non-numeric cells raise DataError naming the row and column.
TabularDataset read_csv_dataset(const std::string& path, const std::string& label_column);
void write_csv_dataset(const std::string& path, const TabularDataset& data);

/// y = X w + b with X ~ N(0, 1); returns the generating weights through `weights`/`bias`.
TabularDataset synthetic_linear_dataset(int rows, int width, std::uint64_t seed, Vector* weights = nullptr,
                                        double* bias = nullptr);

/// K Gaussian clusters with well-separated means; labels 0..K-1.
TabularDataset synthetic_classification_dataset(int rows, int width, int classes, std::uint64_t seed,
                                                double separation = 4.0);

struct ClassifierHyper {
  int epochs = 300;
  double learning_rate = 0.05;
  int batch_size = 64;
  std::vector<int> hidden = {64, 64};
  std::uint64_t seed = 0;
  /// Masked-input augmentation: each row is masked with probability 0.5, mask size uniform in 0..f.
  bool mask_augmentation = false;
};

/// linear: least squares on real labels. logistic/mlp: softmax cross-entropy on integer labels
/// 0..K-1; needs >= 10 rows per class and at least two classes.
TabularModel train_tabular_classifier(const TabularDataset& data, ModelKind kind, const ClassifierHyper& hyper);

/// A randomly initialized softmax MLP (He-scaled), used as a synthetic black box.
TabularModel random_mlp_model(int width, int classes, const std::vector<int>& hidden, std::uint64_t seed,
                              Activation activation = Activation::elu);

// ---------------------------------------------------------------------------
// Synthetic games
// ---------------------------------------------------------------------------

enum class SyntheticKind { random_uniform, glove, majority, additive, unanimity };

std::string_view to_string(SyntheticKind k);
SyntheticKind synthetic_kind_from_string(std::string_view s);

/// random_uniform: i.i.d. U(0,1) value per subset, keyed by (seed, subset bits).
/// glove: v(S) = 1 iff player 0 and at least one other player are in S.
/// majority: v(S) = 1 iff |S| > d/2.
/// additive: v(S) = sum_{i in S} c_i with c_i ~ U(-1, 1) from the seed.
/// unanimity: v(S) = 1 iff {0, 1} is a subset of S.
CoalitionGame synthetic_game(SyntheticKind kind, int d, std::uint64_t seed);

CoalitionGame additive_game(const Vector& coefficients);
CoalitionGame unanimity_game(const FeatureSubset& carrier);

}  // namespace shapx

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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shapx/core.hpp"
#include "shapx/mlp.hpp"
#include "shapx/normalization.hpp"

namespace shapx {

enum class ExplainerKind { simshap, fastshap };

std::string_view to_string(ExplainerKind k);
ExplainerKind explainer_kind_from_string(std::string_view s);

/// 128 units per hidden layer, 512 once the input has 64 or more features; three layers.
std::vector<int> default_explainer_hidden(int input_width);

/// g(x; theta): an MLP whose d*K outputs are read as a d x K matrix (column k = class k).
struct ExplainerNet {
  Mlp<double> mlp;
  int players = 0;
  int classes = 1;
  ExplainerKind kind = ExplainerKind::simshap;

  static ExplainerNet create(int input_width, int players, int classes, ExplainerKind kind,
                             const std::vector<int>& hidden, Activation activation, std::uint64_t seed);

  int input_width() const { return mlp.input_width(); }

  /// d x K attributions for one input.
  Matrix forward(const Vector& x) const;
};

/// Attributions for every class from one forward pass. FastSHAP nets apply additive efficient
/// normalization and need v(N) - v({}) per class; SimSHAP nets return the raw output.
std::vector<Attribution> amortized_inference(const ExplainerNet& net, const Vector& x,
                                             const std::optional<Vector>& v_all = std::nullopt);

/// One amortized_inference per row of `rows`; `v_all` (rows x K) is required for FastSHAP nets.
std::vector<std::vector<Attribution>> amortized_inference_batch(const ExplainerNet& net, const Matrix& rows,
                                                                const std::optional<Matrix>& v_all = std::nullopt);

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

enum class MetricKind { identity, shapley_lsv, explicit_matrix };

std::string_view to_string(MetricKind k);
MetricKind metric_kind_from_string(std::string_view s);

/// The PSD matrix M of ||g - phi||_M^2. shapley_lsv is U^T W U, applied through its closed form.
struct MetricMatrix {
  MetricKind kind = MetricKind::identity;
  Matrix entries;  // explicit_matrix only

  static MetricMatrix identity() { return {}; }
  static MetricMatrix shapley_lsv() { return {MetricKind::shapley_lsv, {}}; }
  /// Rejects non-square, asymmetric or indefinite input.
  static MetricMatrix explicit_matrix(Matrix m);

  Vector apply(const Vector& r) const;
  double quadratic(const Vector& r) const { return r.dot(apply(r)); }
  Matrix dense(int d) const;
};

/// (g - t)^T M (g - t).
double metric_loss(const Vector& g, const Vector& target, const MetricMatrix& metric);

/// sum over proper non-empty S of omega(S) (v(S) - v({}) - g^T 1^S)^2.
double weighted_subset_loss(const CoalitionGame& game, const Vector& g);

/// argmin_g sum_j (g - t_j)^T M (g - t_j), solved as a linear system.
Vector metric_quadratic_minimizer(const Matrix& metric, const std::vector<Vector>& targets);

struct TargetItem {
  Vector x;
  int cls = 0;
  Vector target;  // length d
};

struct FastShapItem {
  Vector x;
  int cls = 0;
  std::vector<FeatureSubset> subsets;
  std::vector<double> values;
  double v_empty = 0.0;
  double v_full = 0.0;
};

struct LossGradient {
  double loss = 0.0;
  Mlp<double>::Gradients gradients;
};

/// Batch mean of (g - target)^T M (g - target) over each item's labeled class.
LossGradient metric_loss_gradient(const ExplainerNet& net, const std::vector<TargetItem>& batch,
                                  const MetricMatrix& metric);

/// Batch mean of (1/m) sum_k (v(S_k) - v({}) - g^T 1^{S_k})^2; g normalized when `normalize`.
LossGradient fastshap_loss_gradient(const ExplainerNet& net, const std::vector<FastShapItem>& batch, bool normalize);

/// Applies one optimizer step and returns the pre-update loss. Non-finite loss or parameters
/// raise TrainingError.
double backward_and_step(ExplainerNet& net, const std::vector<TargetItem>& batch, const MetricMatrix& metric,
                         Optimizer<double>& optimizer, double learning_rate);

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 32;
  int epochs = 100;
  std::int64_t samples = 32;
  /// Subsets per validation item, drawn once; 0 uses `samples`.
  std::int64_t validation_samples = 0;
  bool paired = false;
  OptimizerKind optimizer = OptimizerKind::adamw;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
  double validation_fraction = 0.1;
  /// Epochs without validation improvement before stopping; 0 disables early stopping.
  int patience = 0;
  /// Supervise every class per item instead of only the item's own class.
  bool all_classes = false;
  /// Cosine decay of the learning rate to zero over the run.
  bool cosine_schedule = true;
  /// Exponential moving average of the parameters with this decay (warmed up as
  /// min(decay, (1 + t)/(10 + t)) at step t); validation and the returned explainer use the
  /// average. 0 disables averaging.
  double averaging = 0.0;
  /// FastSHAP only: additive efficient normalization inside the forward pass.
  bool normalize = true;
  MetricMatrix metric;
  int workers = 1;

  /// Throws ArgumentError on lr <= 0, M < 1, odd M with paired, batch < 1 or epochs < 0.
  void validate() const;
  std::int64_t validation_sample_count() const { return validation_samples > 0 ? validation_samples : samples; }
  /// key=value listing used in diagnostics.
  std::string describe() const;
};

struct ExplainerDataset {
  Matrix inputs;            // rows x f
  std::vector<int> classes;  // per row; empty means class 0 throughout

  int rows() const { return static_cast<int>(inputs.rows()); }
  int class_of(int row) const { return classes.empty() ? 0 : classes[static_cast<std::size_t>(row)]; }
};

using GameFactory = std::function<CoalitionGame(const Vector& x, int cls)>;

struct LossRecord {
  int epoch = 0;
  double train = 0.0;
  double validation = 0.0;  // NaN without a validation split
};

struct TrainResult {
  ExplainerNet net;
  std::vector<LossRecord> history;
  std::vector<int> validation_rows;
  bool early_stopped = false;
};

/// Each epoch draws a fresh SimSHAP target per item (M subsets from the kernel distribution)
/// and minimizes ||g - target||_M^2. Validation targets are drawn once and held fixed.
TrainResult train_simshap(const ExplainerNet& net, const ExplainerDataset& data, const GameFactory& games,
                          const TrainConfig& cfg);

/// Each epoch draws M subsets per item and minimizes the FastSHAP weighted subset loss.
TrainResult train_fastshap(const ExplainerNet& net, const ExplainerDataset& data, const GameFactory& games,
                           const TrainConfig& cfg);

/// Trailing `window`-epoch means of `values` never increase (beyond `slack` relative).
bool moving_average_non_increasing(const std::vector<double>& values, int window, double slack = 0.0);

}  // namespace shapx

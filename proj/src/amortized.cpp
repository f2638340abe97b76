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

#include "shapx/amortized.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "shapx/exact.hpp"
#include "shapx/parallel.hpp"
#include "shapx/stochastic.hpp"

namespace shapx {

std::string_view to_string(ExplainerKind k) { return k == ExplainerKind::simshap ? "simshap" : "fastshap"; }

ExplainerKind explainer_kind_from_string(std::string_view s) {
  if (s == "simshap") return ExplainerKind::simshap;
  if (s == "fastshap") return ExplainerKind::fastshap;
  throw ArgumentError("unknown explainer kind '" + std::string(s) + "'");
}

std::vector<int> default_explainer_hidden(int input_width) {
  const int width = input_width >= 64 ? 512 : 128;
  return {width, width, width};
}

ExplainerNet ExplainerNet::create(int input_width, int players, int classes, ExplainerKind kind,
                                  const std::vector<int>& hidden, Activation activation, std::uint64_t seed) {
  if (players < 1 || classes < 1) throw ArgumentError("ExplainerNet: players and classes must be positive");
  std::vector<int> widths{input_width};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(players * classes);
  RandomSource rng(seed, 0xE7);
  ExplainerNet net;
  net.mlp = Mlp<double>::initialized(widths, activation, rng);
  net.players = players;
  net.classes = classes;
  net.kind = kind;
  return net;
}

Matrix ExplainerNet::forward(const Vector& x) const {
  if (x.size() != input_width()) {
    throw ArgumentError("ExplainerNet::forward: input has " + std::to_string(x.size()) + " features, expected " +
                        std::to_string(input_width()));
  }
  const Vector out = mlp.forward(x);
  return Eigen::Map<const Matrix>(out.data(), players, classes);
}

std::vector<Attribution> amortized_inference(const ExplainerNet& net, const Vector& x,
                                             const std::optional<Vector>& v_all) {
  const Matrix g = net.forward(x);
  const bool normalize = net.kind == ExplainerKind::fastshap;
  if (normalize && (!v_all || v_all->size() != net.classes)) {
    throw ArgumentError("amortized_inference: FastSHAP explainers need v(N) - v({}) for each of " +
                        std::to_string(net.classes) + " classes");
  }
  std::vector<Attribution> out(static_cast<std::size_t>(net.classes));
  for (int k = 0; k < net.classes; ++k) {
    auto& a = out[static_cast<std::size_t>(k)];
    a.phi = normalize ? additive_efficient_normalization(g.col(k), (*v_all)[k]) : Vector(g.col(k));
    a.method = normalize ? Method::fastshap_amortized : Method::simshap_amortized;
  }
  return out;
}

std::vector<std::vector<Attribution>> amortized_inference_batch(const ExplainerNet& net, const Matrix& rows,
                                                                const std::optional<Matrix>& v_all) {
  if (v_all && v_all->rows() != rows.rows()) throw ArgumentError("amortized_inference_batch: v_all rows mismatch");
  std::vector<std::vector<Attribution>> out;
  out.reserve(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    std::optional<Vector> va;
    if (v_all) va = v_all->row(r).transpose();
    out.push_back(amortized_inference(net, rows.row(r).transpose(), va));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(MetricKind k) {
  switch (k) {
    case MetricKind::identity:
      return "identity";
    case MetricKind::shapley_lsv:
      return "shapley_lsv";
    case MetricKind::explicit_matrix:
      return "explicit";
  }
  return "unknown";
}

MetricKind metric_kind_from_string(std::string_view s) {
  if (s == "identity") return MetricKind::identity;
  if (s == "shapley_lsv" || s == "lsv") return MetricKind::shapley_lsv;
  if (s == "explicit") return MetricKind::explicit_matrix;
  throw ArgumentError("unknown metric '" + std::string(s) + "'");
}

MetricMatrix MetricMatrix::explicit_matrix(Matrix m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw ArgumentError("MetricMatrix: matrix must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ArgumentError("MetricMatrix: matrix must be finite and symmetric");
  }
  const double lowest = Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  if (lowest < -1e-10 * scale) throw ArgumentError("MetricMatrix: matrix is not positive semi-definite");
  return {MetricKind::explicit_matrix, std::move(m)};
}

Vector MetricMatrix::apply(const Vector& r) const {
  switch (kind) {
    case MetricKind::identity:
      return r;
    case MetricKind::shapley_lsv: {
      const int d = static_cast<int>(r.size());
      if (d == 1) return r;
      const double diag = static_cast<double>(d - 1) / d;
      return (diag * r).array() + shapley_gram_offdiagonal(d) * r.sum();
    }
    case MetricKind::explicit_matrix:
      if (entries.rows() != r.size()) throw ArgumentError("MetricMatrix: dimension mismatch");
      return entries * r;
  }
  return r;
}

Matrix MetricMatrix::dense(int d) const {
  switch (kind) {
    case MetricKind::identity:
      return Matrix::Identity(d, d);
    case MetricKind::shapley_lsv:
      return d == 1 ? Matrix::Identity(1, 1) : shapley_gram_closed_form(d);
    case MetricKind::explicit_matrix:
      if (entries.rows() != d) throw ArgumentError("MetricMatrix: dimension mismatch");
      return entries;
  }
  return {};
}

double metric_loss(const Vector& g, const Vector& target, const MetricMatrix& metric) {
  if (g.size() != target.size()) throw ArgumentError("metric_loss: size mismatch");
  return metric.quadratic(g - target);
}

double weighted_subset_loss(const CoalitionGame& game, const Vector& g) {
  const int d = game.d();
  if (g.size() != d) throw ArgumentError("weighted_subset_loss: size mismatch");
  const KernelWeights kw = kernel_normalizer(d);
  CompensatedSum total;
  for (const FeatureSubset s : enumerate_subsets(d, false)) {
    double fit = 0.0;
    for (std::uint64_t b = s.bits(); b != 0; b &= b - 1) fit += g[std::countr_zero(b)];
    const double r = game(s) - game.v_empty() - fit;
    total.add(kw.omega(s.size()) * r * r);
  }
  return total.value();
}

Vector metric_quadratic_minimizer(const Matrix& metric, const std::vector<Vector>& targets) {
  if (targets.empty()) throw ArgumentError("metric_quadratic_minimizer: no targets");
  Vector rhs = Vector::Zero(metric.rows());
  for (const auto& t : targets) rhs += metric * t;
  const Matrix lhs = static_cast<double>(targets.size()) * metric;
  const Eigen::LDLT<Matrix> ldlt(lhs);
  if (ldlt.info() != Eigen::Success) throw SolverError("metric_quadratic_minimizer: factorization failed");
  return ldlt.solve(rhs);
}

// ---------------------------------------------------------------------------

namespace {

template <typename Item>
Matrix stack_inputs(const ExplainerNet& net, const std::vector<Item>& batch) {
  Matrix X(net.input_width(), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    if (batch[b].x.size() != net.input_width()) throw ArgumentError("explainer batch: input width mismatch");
    if (batch[b].cls < 0 || batch[b].cls >= net.classes) throw ArgumentError("explainer batch: class out of range");
    X.col(static_cast<Eigen::Index>(b)) = batch[b].x;
  }
  return X;
}

}  // namespace

LossGradient metric_loss_gradient(const ExplainerNet& net, const std::vector<TargetItem>& batch,
                                  const MetricMatrix& metric) {
  if (batch.empty()) throw ArgumentError("metric_loss_gradient: empty batch");
  const int d = net.players;
  Mlp<double>::Tape tape;
  const Matrix out = net.mlp.forward(stack_inputs(net, batch), tape);
  Matrix grad = Matrix::Zero(out.rows(), out.cols());
  const double inv = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto col = static_cast<Eigen::Index>(b);
    if (batch[b].target.size() != d) throw ArgumentError("metric_loss_gradient: target length mismatch");
    const Vector r = out.block(batch[b].cls * d, col, d, 1) - batch[b].target;
    const Vector mr = metric.apply(r);
    loss += r.dot(mr) * inv;
    grad.block(batch[b].cls * d, col, d, 1) = 2.0 * inv * mr;
  }
  return {loss, net.mlp.backward(tape, grad)};
}

LossGradient fastshap_loss_gradient(const ExplainerNet& net, const std::vector<FastShapItem>& batch, bool normalize) {
  if (batch.empty()) throw ArgumentError("fastshap_loss_gradient: empty batch");
  const int d = net.players;
  Mlp<double>::Tape tape;
  const Matrix out = net.mlp.forward(stack_inputs(net, batch), tape);
  Matrix grad = Matrix::Zero(out.rows(), out.cols());
  const double inv = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& item = batch[b];
    const auto col = static_cast<Eigen::Index>(b);
    if (item.subsets.empty() || item.subsets.size() != item.values.size()) {
      throw ArgumentError("fastshap_loss_gradient: item needs matching subsets and values");
    }
    const Vector raw = out.block(item.cls * d, col, d, 1);
    const Vector g = normalize ? additive_efficient_normalization(raw, item.v_full - item.v_empty) : raw;
    const double scale = inv / static_cast<double>(item.subsets.size());
    Vector dg = Vector::Zero(d);
    for (std::size_t k = 0; k < item.subsets.size(); ++k) {
      double fit = 0.0;
      const std::uint64_t bits = item.subsets[k].bits();
      for (std::uint64_t m = bits; m != 0; m &= m - 1) fit += g[std::countr_zero(m)];
      const double r = item.values[k] - item.v_empty - fit;
      loss += scale * r * r;
      for (std::uint64_t m = bits; m != 0; m &= m - 1) dg[std::countr_zero(m)] -= 2.0 * scale * r;
    }
    if (normalize) dg.array() -= dg.mean();
    grad.block(item.cls * d, col, d, 1) = dg;
  }
  return {loss, net.mlp.backward(tape, grad)};
}

namespace {

void check_step(const ExplainerNet& net, double loss) {
  if (!std::isfinite(loss)) throw TrainingError("training loss is not finite");
  if (!net.mlp.all_finite()) throw TrainingError("explainer parameters became non-finite after an update");
}

}  // namespace

double backward_and_step(ExplainerNet& net, const std::vector<TargetItem>& batch, const MetricMatrix& metric,
                         Optimizer<double>& optimizer, double learning_rate) {
  for (const auto& item : batch) {
    if (!item.target.allFinite()) throw TrainingError("backward_and_step: non-finite target");
  }
  const LossGradient lg = metric_loss_gradient(net, batch, metric);
  if (!std::isfinite(lg.loss)) throw TrainingError("backward_and_step: loss is not finite");
  optimizer.step(net.mlp, lg.gradients, learning_rate);
  check_step(net, lg.loss);
  return lg.loss;
}

// ---------------------------------------------------------------------------

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ArgumentError("learning rate must be positive");
  if (samples < 1) throw ArgumentError("samples per input must be >= 1");
  if (paired && samples % 2 != 0) throw ArgumentError("paired sampling needs an even number of samples");
  if (validation_samples < 0) throw ArgumentError("validation samples must be >= 0");
  if (paired && validation_samples % 2 != 0) throw ArgumentError("paired sampling needs an even validation sample count");
  if (batch_size < 1) throw ArgumentError("batch size must be >= 1");
  if (epochs < 0) throw ArgumentError("epochs must be >= 0");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw ArgumentError("validation fraction must be in [0, 1)");
  }
  if (patience < 0) throw ArgumentError("patience must be >= 0");
  if (weight_decay < 0.0) throw ArgumentError("weight decay must be >= 0");
  if (!(averaging >= 0.0 && averaging < 1.0)) throw ArgumentError("averaging decay must be in [0, 1)");
}

std::string TrainConfig::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "seed=" << seed << " learning_rate=" << learning_rate << " batch_size=" << batch_size << " epochs=" << epochs
     << " samples=" << samples << " validation_samples=" << validation_samples << " paired=" << paired << " optimizer=" << to_string(optimizer)
     << " weight_decay=" << weight_decay << " validation_fraction=" << validation_fraction
     << " patience=" << patience << " all_classes=" << all_classes << " cosine_schedule=" << cosine_schedule << " averaging=" << averaging
     << " normalize=" << normalize << " metric=" << to_string(metric.kind) << " workers=" << workers;
  return os.str();
}

bool moving_average_non_increasing(const std::vector<double>& values, int window, double slack) {
  if (window < 1) throw ArgumentError("moving_average_non_increasing: window must be >= 1");
  if (values.size() < static_cast<std::size_t>(window) + 1) return true;
  double sum = std::accumulate(values.begin(), values.begin() + window, 0.0);
  double previous = sum / window;
  for (std::size_t i = static_cast<std::size_t>(window); i < values.size(); ++i) {
    sum += values[i] - values[i - static_cast<std::size_t>(window)];
    const double current = sum / window;
    if (current > previous + slack * std::abs(previous)) return false;
    previous = current;
  }
  return true;
}

namespace {

constexpr std::uint64_t kSplitStream = 0x5157;
constexpr std::uint64_t kShuffleStream = 0xE90C;
constexpr std::uint64_t kTargetStream = 0x7A6E;
constexpr std::uint64_t kValidationStream = 0xA11D;

struct Slot {
  int row;
  int cls;
  std::size_t game;
};

/// Shared epoch loop. make_item(slot, rng, M) builds one supervised item from M subsets; loss_fn(net, batch)
/// returns the batch loss and its gradient.
template <typename Item, typename MakeItem, typename LossFn>
TrainResult run_training(const ExplainerNet& initial, const ExplainerDataset& data, const GameFactory& factory,
                         const TrainConfig& cfg, std::vector<CoalitionGame>& games, MakeItem make_item,
                         LossFn loss_fn) {
  cfg.validate();
  const int n = data.rows();
  if (n == 0) throw ArgumentError("training dataset is empty");
  if (data.inputs.cols() != initial.input_width()) {
    throw ArgumentError("training inputs have " + std::to_string(data.inputs.cols()) + " features, explainer expects " +
                        std::to_string(initial.input_width()));
  }
  if (!data.classes.empty() && data.classes.size() != static_cast<std::size_t>(n)) {
    throw ArgumentError("training dataset: class list length mismatch");
  }

  // Games per (row, class).
  std::vector<std::vector<Slot>> slots(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) {
    const Vector x = data.inputs.row(r).transpose();
    std::vector<int> classes;
    if (cfg.all_classes) {
      classes.resize(static_cast<std::size_t>(initial.classes));
      std::iota(classes.begin(), classes.end(), 0);
    } else {
      classes.push_back(data.class_of(r));
    }
    for (int k : classes) {
      if (k < 0 || k >= initial.classes) throw ArgumentError("training dataset: class out of range");
      games.push_back(factory(x, k));
      if (games.back().d() != initial.players) throw ArgumentError("game player count differs from explainer");
      slots[static_cast<std::size_t>(r)].push_back({r, k, games.size() - 1});
    }
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  {
    RandomSource rng(cfg.seed, kSplitStream);
    for (int j = n - 1; j > 0; --j) std::swap(order[static_cast<std::size_t>(j)], order[rng.below(static_cast<std::uint64_t>(j + 1))]);
  }
  int n_val = 0;
  if (n >= 2 && cfg.validation_fraction > 0.0) {
    n_val = std::clamp(static_cast<int>(std::lround(cfg.validation_fraction * n)), 1, n - 1);
  }
  TrainResult result{initial, {}, std::vector<int>(order.begin(), order.begin() + n_val), false};
  std::vector<int> train_rows(order.begin() + n_val, order.end());
  std::sort(train_rows.begin(), train_rows.end());

  auto build = [&](const std::vector<Slot>& wanted, std::int64_t samples, auto&& stream_for) {
    std::vector<Item> items(wanted.size());
    parallel_for(wanted.size(), cfg.workers, [&](std::size_t i) {
      RandomSource rng = stream_for(wanted[i]);
      items[i] = make_item(wanted[i], rng, samples);
    });
    return items;
  };

  std::vector<Slot> val_slots;
  for (int r : result.validation_rows) {
    for (const auto& s : slots[static_cast<std::size_t>(r)]) val_slots.push_back(s);
  }
  const std::vector<Item> val_items = build(val_slots, cfg.validation_sample_count(), [&](const Slot& s) {
    return RandomSource(cfg.seed, kValidationStream).split(static_cast<std::uint64_t>(s.row)).split(static_cast<std::uint64_t>(s.cls));
  });

  Optimizer<double> optimizer(cfg.optimizer, cfg.weight_decay);
  ExplainerNet& net = result.net;
  const int rows_per_batch = cfg.batch_size;
  const std::int64_t steps_per_epoch = (static_cast<std::int64_t>(train_rows.size()) + rows_per_batch - 1) / rows_per_batch;
  const double total_steps = static_cast<double>(steps_per_epoch) * std::max(cfg.epochs, 1);
  std::int64_t step = 0;
  std::optional<double> initial_loss;
  double best_validation = std::numeric_limits<double>::infinity();
  const bool averaging = cfg.averaging > 0.0;
  Vector average = averaging ? net.mlp.parameters() : Vector();
  ExplainerNet averaged = net;
  auto evaluated = [&]() -> const ExplainerNet& {
    if (!averaging) return net;
    averaged.mlp.set_parameters(average);
    return averaged;
  };
  int since_best = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<int> epoch_rows = train_rows;
    RandomSource shuffle = RandomSource(cfg.seed, kShuffleStream).split(static_cast<std::uint64_t>(epoch));
    for (std::size_t j = epoch_rows.size(); j > 1; --j) {
      std::swap(epoch_rows[j - 1], epoch_rows[shuffle.below(j)]);
    }
    const RandomSource epoch_stream = RandomSource(cfg.seed, kTargetStream).split(static_cast<std::uint64_t>(epoch));
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t start = 0; start < epoch_rows.size(); start += static_cast<std::size_t>(rows_per_batch)) {
      const std::size_t stop = std::min(epoch_rows.size(), start + static_cast<std::size_t>(rows_per_batch));
      std::vector<Slot> wanted;
      for (std::size_t j = start; j < stop; ++j) {
        for (const auto& s : slots[static_cast<std::size_t>(epoch_rows[j])]) wanted.push_back(s);
      }
      const std::vector<Item> batch = build(wanted, cfg.samples, [&](const Slot& s) {
        return epoch_stream.split(static_cast<std::uint64_t>(s.row)).split(static_cast<std::uint64_t>(s.cls));
      });
      const LossGradient lg = loss_fn(net, batch);
      if (!std::isfinite(lg.loss)) {
        throw TrainingError("training loss is not finite at epoch " + std::to_string(epoch) + "; " + cfg.describe());
      }
      if (!initial_loss) initial_loss = lg.loss;
      if (lg.loss > 1e3 * *initial_loss && lg.loss > 1e-8) {
        std::ostringstream os;
        os.precision(17);
        os << "training diverged at epoch " << epoch << ": loss " << lg.loss << " exceeds 1000x the initial loss "
           << *initial_loss << "; " << cfg.describe();
        throw TrainingError(os.str());
      }
      const double lr = cfg.cosine_schedule
                            ? cfg.learning_rate * 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(step) / total_steps))
                            : cfg.learning_rate;
      optimizer.step(net.mlp, lg.gradients, lr);
      if (!net.mlp.all_finite()) {
        throw TrainingError("explainer parameters became non-finite at epoch " + std::to_string(epoch) + "; " +
                            cfg.describe());
      }
      ++step;
      if (averaging) {
        const double t = static_cast<double>(step);
        const double decay = std::min(cfg.averaging, (1.0 + t) / (10.0 + t));
        average = decay * average + (1.0 - decay) * net.mlp.parameters();
      }
      loss_sum += lg.loss * static_cast<double>(batch.size());
      loss_count += batch.size();
    }

    LossRecord record;
    record.epoch = epoch;
    record.train = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : std::numeric_limits<double>::quiet_NaN();
    record.validation =
        val_items.empty() ? std::numeric_limits<double>::quiet_NaN() : loss_fn(evaluated(), val_items).loss;
    result.history.push_back(record);

    if (cfg.patience > 0 && !val_items.empty()) {
      if (record.validation < best_validation) {
        best_validation = record.validation;
        since_best = 0;
      } else if (++since_best >= cfg.patience) {
        result.early_stopped = true;
        break;
      }
    }
  }
  if (averaging) net.mlp.set_parameters(average);
  return result;
}

}  // namespace

TrainResult train_simshap(const ExplainerNet& net, const ExplainerDataset& data, const GameFactory& factory,
                          const TrainConfig& cfg) {
  if (net.kind != ExplainerKind::simshap) throw ArgumentError("train_simshap: explainer kind must be simshap");
  if (net.players < 2) throw DomainError("train_simshap: needs at least two players");
  std::vector<CoalitionGame> games;
  games.reserve(static_cast<std::size_t>(data.rows()) * static_cast<std::size_t>(cfg.all_classes ? net.classes : 1));
  auto make_item = [&](const Slot& s, RandomSource& rng, std::int64_t M) {
    return TargetItem{data.inputs.row(s.row).transpose(), s.cls, simshap_target(games[s.game], M, rng, cfg.paired).phi};
  };
  auto loss_fn = [&](const ExplainerNet& current, const std::vector<TargetItem>& batch) {
    return metric_loss_gradient(current, batch, cfg.metric);
  };
  return run_training<TargetItem>(net, data, factory, cfg, games, make_item, loss_fn);
}

TrainResult train_fastshap(const ExplainerNet& net, const ExplainerDataset& data, const GameFactory& factory,
                           const TrainConfig& cfg) {
  if (net.kind != ExplainerKind::fastshap) throw ArgumentError("train_fastshap: explainer kind must be fastshap");
  if (net.players < 2) throw DomainError("train_fastshap: needs at least two players");
  std::vector<CoalitionGame> games;
  games.reserve(static_cast<std::size_t>(data.rows()) * static_cast<std::size_t>(cfg.all_classes ? net.classes : 1));
  const KernelWeights kw = kernel_normalizer(net.players);
  auto make_item = [&](const Slot& s, RandomSource& rng, std::int64_t M) {
    const CoalitionGame& game = games[s.game];
    ValueCache cache(game);
    SampledBatch sampled = sample_kernel_batch(cache, kw, M, rng, cfg.paired);
    return FastShapItem{data.inputs.row(s.row).transpose(), s.cls, std::move(sampled.subsets),
                        std::move(sampled.values), game.v_empty(), game.v_full()};
  };
  auto loss_fn = [&](const ExplainerNet& current, const std::vector<FastShapItem>& batch) {
    return fastshap_loss_gradient(current, batch, cfg.normalize);
  };
  return run_training<FastShapItem>(net, data, factory, cfg, games, make_item, loss_fn);
}

}  // namespace shapx

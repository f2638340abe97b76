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

#include "shapx/models.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace shapx {

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::linear:
      return "linear";
    case ModelKind::logistic:
      return "logistic";
    case ModelKind::mlp:
      return "mlp";
  }
  return "unknown";
}

ModelKind model_kind_from_string(std::string_view s) {
  if (s == "linear") return ModelKind::linear;
  if (s == "logistic") return ModelKind::logistic;
  if (s == "mlp") return ModelKind::mlp;
  throw ArgumentError("unknown model kind '" + std::string(s) + "'");
}

namespace {

Vector softmax(const Vector& logits) {
  const double top = logits.maxCoeff();
  Vector e = (logits.array() - top).exp();
  return e / e.sum();
}

Matrix softmax_columns(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) out.col(c) = softmax(logits.col(c));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

TabularModel TabularModel::linear(Matrix weights, Vector bias) {
  if (weights.rows() != bias.size()) throw ArgumentError("TabularModel::linear: weights/bias shape mismatch");
  TabularModel m;
  m.kind_ = ModelKind::linear;
  m.input_width_ = static_cast<int>(weights.cols());
  m.classes_ = static_cast<int>(weights.rows());
  m.weights_ = std::move(weights);
  m.bias_ = std::move(bias);
  return m;
}

TabularModel TabularModel::logistic(Matrix weights, Vector bias) {
  TabularModel m = linear(std::move(weights), std::move(bias));
  m.kind_ = ModelKind::logistic;
  return m;
}

TabularModel TabularModel::mlp(Mlp<double> network) {
  TabularModel m;
  m.kind_ = ModelKind::mlp;
  m.input_width_ = network.input_width();
  m.classes_ = network.output_width();
  m.network_ = std::move(network);
  return m;
}

Vector TabularModel::predict(const Vector& x) const {
  if (x.size() != input_width_) {
    throw ArgumentError("TabularModel::predict: input has " + std::to_string(x.size()) + " features, expected " +
                        std::to_string(input_width_));
  }
  switch (kind_) {
    case ModelKind::linear:
      return weights_ * x + bias_;
    case ModelKind::logistic:
      return softmax(weights_ * x + bias_);
    case ModelKind::mlp:
      return softmax(network_.forward(x));
  }
  return {};
}

Matrix TabularModel::predict_batch(const Matrix& rows) const {
  if (rows.cols() != input_width_) throw ArgumentError("TabularModel::predict_batch: width mismatch");
  Matrix scores;
  switch (kind_) {
    case ModelKind::linear:
      scores = (weights_ * rows.transpose()).colwise() + bias_;
      break;
    case ModelKind::logistic:
      scores = softmax_columns((weights_ * rows.transpose()).colwise() + bias_);
      break;
    case ModelKind::mlp:
      scores = softmax_columns(network_.forward(Matrix(rows.transpose())));
      break;
  }
  return scores.transpose();
}

int TabularModel::predicted_class(const Vector& x) const {
  Eigen::Index best = 0;
  predict(x).maxCoeff(&best);
  return static_cast<int>(best);
}

// ---------------------------------------------------------------------------

MaskingRule MaskingRule::training_mean(const Matrix& rows) {
  MaskingRule r;
  r.kind = BaselineKind::training_mean;
  r.baseline = rows.colwise().mean().transpose();
  return r;
}

MaskingRule MaskingRule::fixed(Vector baseline) {
  MaskingRule r;
  r.kind = BaselineKind::fixed;
  r.baseline = std::move(baseline);
  return r;
}

Vector MaskingRule::baseline_for(int width) const {
  if (kind == BaselineKind::zeros) return Vector::Zero(width);
  if (baseline.size() != width) throw ArgumentError("MaskingRule: baseline width mismatch");
  return baseline;
}

Vector MaskingRule::apply(const Vector& x, const FeatureSubset& s) const {
  Vector out = baseline_for(static_cast<int>(x.size()));
  for (std::uint64_t b = s.bits(); b != 0; b &= b - 1) {
    const int i = std::countr_zero(b);
    out[i] = x[i];
  }
  return out;
}

CoalitionGame masked_game(std::shared_ptr<const TabularModel> model, const Vector& x, int cls,
                          const MaskingRule& rule) {
  if (!x.allFinite()) throw ArgumentError("masked_game: input is not finite");
  if (cls < 0 || cls >= model->classes()) {
    throw ArgumentError("masked_game: class " + std::to_string(cls) + " outside 0.." +
                        std::to_string(model->classes() - 1));
  }
  if (x.size() != model->input_width()) throw ArgumentError("masked_game: input width mismatch");
  const Vector baseline = rule.baseline_for(model->input_width());
  return CoalitionGame(static_cast<int>(x.size()), [model, x, cls, baseline](const FeatureSubset& s) {
    Vector masked = baseline;
    for (std::uint64_t b = s.bits(); b != 0; b &= b - 1) {
      const int i = std::countr_zero(b);
      masked[i] = x[i];
    }
    return model->predict(masked)[cls];
  });
}

CoalitionGame masked_game(const TabularModel& model, const Vector& x, int cls, const MaskingRule& rule) {
  return masked_game(std::make_shared<const TabularModel>(model), x, cls, rule);
}

Attribution linear_model_shapley(const Vector& weights, double /*bias*/, const Vector& x, const Vector& baseline) {
  if (weights.size() != x.size() || baseline.size() != x.size()) {
    throw ArgumentError("linear_model_shapley: shapes disagree");
  }
  Attribution out;
  out.phi = weights.cwiseProduct(x - baseline);
  out.method = Method::linear_closed_form;
  return out;
}

Attribution linear_model_shapley(const Vector& weights, double bias, const Vector& x) {
  return linear_model_shapley(weights, bias, x, Vector::Zero(x.size()));
}

// ---------------------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.push_back(trim(field));
  return out;
}

}  // namespace

TabularDataset read_csv_dataset(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("dataset '" + path + "' is empty");
  const auto header = split_csv_line(line);
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw DataError("dataset '" + path + "' has no label column '" + label_column + "'");
  }
  const auto label_index = static_cast<std::size_t>(std::distance(header.begin(), label_it));

  TabularDataset data;
  data.label_name = label_column;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_index) data.feature_names.push_back(header[c]);
  }

  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  int row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError("dataset '" + path + "' row " + std::to_string(row_number) + ": expected " +
                      std::to_string(header.size()) + " columns, found " + std::to_string(cells.size()));
    }
    std::vector<double> values;
    values.reserve(header.size() - 1);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string& cell = cells[c];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw DataError("dataset '" + path + "' row " + std::to_string(row_number) + ", column '" + header[c] +
                        "': " + (cell.empty() ? std::string("missing value") : "non-numeric value '" + cell + "'"));
      }
      if (c == label_index) {
        labels.push_back(v);
      } else {
        values.push_back(v);
      }
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw DataError("dataset '" + path + "' has no data rows");

  data.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(header.size() - 1));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      data.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  data.labels = Eigen::Map<const Vector>(labels.data(), static_cast<Eigen::Index>(labels.size()));
  return data;
}

void write_csv_dataset(const std::string& path, const TabularDataset& data) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset '" + path + "'");
  out.precision(17);
  for (const auto& name : data.feature_names) out << name << ',';
  out << data.label_name << '\n';
  for (Eigen::Index r = 0; r < data.features.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.features.cols(); ++c) out << data.features(r, c) << ',';
    out << data.labels[r] << '\n';
  }
}

namespace {

std::vector<std::string> default_feature_names(int width) {
  std::vector<std::string> names;
  for (int i = 0; i < width; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

}  // namespace

TabularDataset synthetic_linear_dataset(int rows, int width, std::uint64_t seed, Vector* weights, double* bias) {
  RandomSource rng(seed, 0x11);
  Vector w(width);
  for (int i = 0; i < width; ++i) w[i] = 2.0 * rng.uniform() - 1.0;
  const double b = 2.0 * rng.uniform() - 1.0;
  TabularDataset data;
  data.feature_names = default_feature_names(width);
  data.label_name = "label";
  data.features.resize(rows, width);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < width; ++c) data.features(r, c) = rng.normal();
  }
  data.labels = (data.features * w).array() + b;
  if (weights != nullptr) *weights = w;
  if (bias != nullptr) *bias = b;
  return data;
}

TabularDataset synthetic_classification_dataset(int rows, int width, int classes, std::uint64_t seed,
                                                double separation) {
  RandomSource rng(seed, 0x22);
  Matrix means(classes, width);
  for (int k = 0; k < classes; ++k) {
    for (int c = 0; c < width; ++c) means(k, c) = separation * (2.0 * rng.uniform() - 1.0);
  }
  TabularDataset data;
  data.feature_names = default_feature_names(width);
  data.label_name = "label";
  data.features.resize(rows, width);
  data.labels.resize(rows);
  for (int r = 0; r < rows; ++r) {
    const int k = r % classes;
    data.labels[r] = k;
    for (int c = 0; c < width; ++c) data.features(r, c) = means(k, c) + rng.normal();
  }
  return data;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<int> integer_labels(const Vector& labels, int& classes) {
  std::vector<int> out(static_cast<std::size_t>(labels.size()));
  classes = 0;
  for (Eigen::Index r = 0; r < labels.size(); ++r) {
    const double v = labels[r];
    if (v < 0 || v != std::floor(v) || v > 1e6) {
      throw DataError("labels must be non-negative integers; row " + std::to_string(r + 1) + " has " +
                      std::to_string(v));
    }
    out[static_cast<std::size_t>(r)] = static_cast<int>(v);
    classes = std::max(classes, static_cast<int>(v) + 1);
  }
  return out;
}

TabularModel train_softmax(const TabularDataset& data, const std::vector<int>& labels, int classes,
                           std::vector<int> hidden, Activation activation, const ClassifierHyper& hyper) {
  const int f = data.width();
  const int n = data.rows();
  const Vector mean = data.features.colwise().mean().transpose();
  Vector scale = ((data.features.rowwise() - mean.transpose()).colwise().squaredNorm() / std::max(1, n - 1))
                     .transpose()
                     .cwiseSqrt();
  for (Eigen::Index c = 0; c < scale.size(); ++c) {
    if (!(scale[c] > 1e-12)) scale[c] = 1.0;
  }

  std::vector<int> widths{f};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(classes);
  RandomSource init(hyper.seed, 0x33);
  Mlp<double> net = Mlp<double>::initialized(widths, activation, init);
  Optimizer<double> opt(OptimizerKind::adamw);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const int batch = std::max(1, std::min(hyper.batch_size, n));
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    RandomSource rng(hyper.seed, 0x1000 + static_cast<std::uint64_t>(epoch));
    for (int j = n - 1; j > 0; --j) {
      std::swap(order[static_cast<std::size_t>(j)], order[rng.below(static_cast<std::uint64_t>(j + 1))]);
    }
    for (int start = 0; start < n; start += batch) {
      const int count = std::min(batch, n - start);
      Matrix X(f, count);
      Matrix target = Matrix::Zero(classes, count);
      for (int b = 0; b < count; ++b) {
        const int r = order[static_cast<std::size_t>(start + b)];
        Vector x = data.features.row(r).transpose();
        if (hyper.mask_augmentation && rng.uniform() < 0.5) {
          const int keep = static_cast<int>(rng.below(static_cast<std::uint64_t>(f + 1)));
          x = MaskingRule::zeros().apply(x, uniform_subset_of_size(f, keep, rng));
        }
        X.col(b) = (x - mean).cwiseQuotient(scale);
        target(labels[static_cast<std::size_t>(r)], b) = 1.0;
      }
      Mlp<double>::Tape tape;
      const Matrix logits = net.forward(X, tape);
      const Matrix grad = (softmax_columns(logits) - target) / static_cast<double>(count);
      opt.step(net, net.backward(tape, grad), hyper.learning_rate);
    }
  }

  // Fold the standardization into the first layer so the model consumes raw features.
  auto& first = net.layers().front();
  first.weight = first.weight * scale.cwiseInverse().asDiagonal();
  first.bias -= first.weight * mean;
  return TabularModel::mlp(std::move(net));
}

}  // namespace

TabularModel train_tabular_classifier(const TabularDataset& data, ModelKind kind, const ClassifierHyper& hyper) {
  if (data.rows() == 0 || data.width() == 0) throw DataError("train_tabular_classifier: empty dataset");
  if (kind == ModelKind::linear) {
    if (data.rows() < 10) throw DataError("train_tabular_classifier: need at least 10 rows");
    Matrix design(data.rows(), data.width() + 1);
    design << data.features, Vector::Ones(data.rows());
    const Vector coef = design.colPivHouseholderQr().solve(data.labels);
    Matrix w = coef.head(data.width()).transpose();
    Vector b = Vector::Constant(1, coef[data.width()]);
    TabularModel model = TabularModel::linear(std::move(w), std::move(b));
    model.metadata()["trainer"] = "least_squares";
    return model;
  }

  int classes = 0;
  const auto labels = integer_labels(data.labels, classes);
  std::vector<int> counts(static_cast<std::size_t>(classes), 0);
  for (int y : labels) ++counts[static_cast<std::size_t>(y)];
  const int present = static_cast<int>(std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }));
  if (present < 2) throw DataError("train_tabular_classifier: degenerate labels (fewer than two classes)");
  for (int k = 0; k < classes; ++k) {
    if (counts[static_cast<std::size_t>(k)] < 10) {
      throw DataError("train_tabular_classifier: class " + std::to_string(k) + " has " +
                      std::to_string(counts[static_cast<std::size_t>(k)]) + " rows, need at least 10");
    }
  }

  if (kind == ModelKind::logistic) {
    TabularModel net = train_softmax(data, labels, classes, {}, Activation::relu, hyper);
    const auto& layer = net.network().layers().front();
    TabularModel model = TabularModel::logistic(layer.weight, layer.bias);
    model.metadata()["trainer"] = "adamw_cross_entropy";
    return model;
  }
  TabularModel model = train_softmax(data, labels, classes, hyper.hidden, Activation::elu, hyper);
  model.metadata()["trainer"] = "adamw_cross_entropy";
  if (hyper.mask_augmentation) {
    model.metadata()["mask_distribution"] = "uniform_size";
    model.metadata()["mask_probability"] = "0.5";
  }
  return model;
}

TabularModel random_mlp_model(int width, int classes, const std::vector<int>& hidden, std::uint64_t seed,
                              Activation activation) {
  std::vector<int> widths{width};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(classes);
  RandomSource rng(seed, 0x44);
  Mlp<double> net = Mlp<double>::initialized(widths, activation, rng, std::sqrt(6.0));
  for (auto& layer : net.layers()) {
    for (Eigen::Index k = 0; k < layer.bias.size(); ++k) layer.bias[k] = 0.1 * (2.0 * rng.uniform() - 1.0);
  }
  TabularModel model = TabularModel::mlp(std::move(net));
  model.metadata()["trainer"] = "random_init";
  return model;
}

// ---------------------------------------------------------------------------

std::string_view to_string(SyntheticKind k) {
  switch (k) {
    case SyntheticKind::random_uniform:
      return "random_uniform";
    case SyntheticKind::glove:
      return "glove";
    case SyntheticKind::majority:
      return "majority";
    case SyntheticKind::additive:
      return "additive";
    case SyntheticKind::unanimity:
      return "unanimity";
  }
  return "unknown";
}

SyntheticKind synthetic_kind_from_string(std::string_view s) {
  if (s == "random_uniform" || s == "random") return SyntheticKind::random_uniform;
  if (s == "glove") return SyntheticKind::glove;
  if (s == "majority") return SyntheticKind::majority;
  if (s == "additive") return SyntheticKind::additive;
  if (s == "unanimity") return SyntheticKind::unanimity;
  throw ArgumentError("unknown synthetic game '" + std::string(s) + "'");
}

CoalitionGame additive_game(const Vector& coefficients) {
  return CoalitionGame(static_cast<int>(coefficients.size()), [coefficients](const FeatureSubset& s) {
    double v = 0.0;
    for (std::uint64_t b = s.bits(); b != 0; b &= b - 1) v += coefficients[std::countr_zero(b)];
    return v;
  });
}

CoalitionGame unanimity_game(const FeatureSubset& carrier) {
  const std::uint64_t t = carrier.bits();
  return CoalitionGame(carrier.d(), [t](const FeatureSubset& s) { return (s.bits() & t) == t ? 1.0 : 0.0; });
}

CoalitionGame synthetic_game(SyntheticKind kind, int d, std::uint64_t seed) {
  if (d < 1 || d > kMaxPlayers) throw ArgumentError("synthetic_game: d must be in 1..64");
  switch (kind) {
    case SyntheticKind::random_uniform:
      return CoalitionGame(d, [seed](const FeatureSubset& s) { return RandomSource(seed, s.bits()).uniform(); });
    case SyntheticKind::glove:
      if (d < 2) throw ArgumentError("synthetic_game: glove needs d >= 2");
      return CoalitionGame(d, [](const FeatureSubset& s) { return (s.contains(0) && (s.bits() >> 1) != 0) ? 1.0 : 0.0; });
    case SyntheticKind::majority:
      return CoalitionGame(d, [d](const FeatureSubset& s) { return 2 * s.size() > d ? 1.0 : 0.0; });
    case SyntheticKind::additive: {
      RandomSource rng(seed, 0x55);
      Vector c(d);
      for (int i = 0; i < d; ++i) c[i] = 2.0 * rng.uniform() - 1.0;
      return additive_game(c);
    }
    case SyntheticKind::unanimity:
      if (d < 2) throw ArgumentError("synthetic_game: unanimity needs d >= 2");
      return unanimity_game(FeatureSubset::from_indices({0, 1}, d));
  }
  throw ArgumentError("synthetic_game: unknown kind");
}

}  // namespace shapx

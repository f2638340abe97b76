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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "shapx/errors.hpp"
#include "shapx/exact.hpp"
#include "shapx/models.hpp"
#include "test_util.hpp"

namespace shapx {
namespace {

namespace fs = std::filesystem;
using testing::max_abs_diff;

Vector random_vector(int n, RandomSource& rng) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

std::string temp_path(const std::string& name) { return (fs::temp_directory_path() / ("shapx_models_" + name)).string(); }

void write_file(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

double accuracy(const TabularModel& m, const TabularDataset& data) {
  int hits = 0;
  for (int r = 0; r < data.rows(); ++r) hits += m.predicted_class(data.features.row(r).transpose()) == data.labels[r];
  return static_cast<double>(hits) / data.rows();
}

TEST(TabularModel, LinearPredict) {
  const TabularModel m = TabularModel::linear(Matrix{{2.0, -1.0}}, Vector{{0.5}});
  EXPECT_DOUBLE_EQ(m.predict(Vector{{3.0, 4.0}})[0], 2.5);
  EXPECT_EQ(m.classes(), 1);
  EXPECT_THROW(m.predict(Vector::Zero(3)), ArgumentError);
  EXPECT_THROW(TabularModel::linear(Matrix::Ones(2, 2), Vector::Ones(3)), ArgumentError);
}

TEST(TabularModel, LogisticIsSoftmax) {
  const TabularModel m = TabularModel::logistic(Matrix{{1.0, 0.0}, {0.0, 1.0}}, Vector::Zero(2));
  const Vector p = m.predict(Vector{{std::log(3.0), 0.0}});
  EXPECT_NEAR(p[0], 0.75, 1e-15);
  EXPECT_NEAR(p.sum(), 1.0, 1e-15);
  EXPECT_EQ(m.predicted_class(Vector{{1.0, 0.0}}), 0);
}

TEST(TabularModel, BatchMatchesSingle) {
  const TabularModel m = random_mlp_model(5, 3, {8, 8}, 1);
  RandomSource rng(1);
  Matrix rows(4, 5);
  for (int r = 0; r < 4; ++r) rows.row(r) = random_vector(5, rng).transpose();
  const Matrix out = m.predict_batch(rows);
  for (int r = 0; r < 4; ++r) {
    EXPECT_LT(max_abs_diff(out.row(r).transpose(), m.predict(rows.row(r).transpose())), 1e-14);
  }
}

TEST(MaskingRule, MaskedInputTakesBaselineOffS) {
  const Vector x{{1.0, 2.0, 3.0}};
  const FeatureSubset s = FeatureSubset::from_indices({0, 2}, 3);
  EXPECT_EQ(MaskingRule::zeros().apply(x, s), (Vector{{1.0, 0.0, 3.0}}));
  EXPECT_EQ(MaskingRule::fixed(Vector{{9.0, 8.0, 7.0}}).apply(x, s), (Vector{{1.0, 8.0, 3.0}}));
  const MaskingRule mean = MaskingRule::training_mean(Matrix{{0.0, 2.0, 4.0}, {2.0, 4.0, 6.0}});
  EXPECT_EQ(mean.apply(x, s), (Vector{{1.0, 3.0, 3.0}}));
  EXPECT_THROW(MaskingRule::fixed(Vector::Zero(2)).apply(x, s), ArgumentError);
}

TEST(MaskedGame, EndpointsAndConsistency) {
  RandomSource rng(2);
  std::vector<TabularModel> models{
      TabularModel::linear(Matrix::Random(2, 6), Vector::Random(2)),
      TabularModel::logistic(Matrix::Random(3, 6), Vector::Random(3)),
      random_mlp_model(6, 3, {16}, 3),
  };
  for (const TabularModel& model : models) {
    for (int trial = 0; trial < 20; ++trial) {
      const Vector x = random_vector(6, rng);
      const int cls = static_cast<int>(rng.below(static_cast<std::uint64_t>(model.classes())));
      const CoalitionGame g = masked_game(model, x, cls);
      EXPECT_EQ(g.d(), 6);
      EXPECT_EQ(g.v_full(), model.predict(x)[cls]);
      EXPECT_EQ(g.v_empty(), model.predict(Vector::Zero(6))[cls]);
      const FeatureSubset s(rng() & 63u, 6);
      EXPECT_EQ(g(s), g(s));
      EXPECT_EQ(g.v_empty(), g(FeatureSubset::empty(6)));
      EXPECT_EQ(g.v_full(), g(FeatureSubset::full(6)));
    }
  }
}

TEST(MaskedGame, ZeroInputIsConstantGame) {
  const TabularModel model = random_mlp_model(5, 2, {8}, 4);
  const CoalitionGame g = masked_game(model, Vector::Zero(5), 1);
  EXPECT_EQ(exact_shapley(g).phi.cwiseAbs().maxCoeff(), 0.0);
}

TEST(MaskedGame, RejectsBadArguments) {
  const TabularModel model = random_mlp_model(3, 2, {4}, 5);
  EXPECT_THROW(masked_game(model, Vector::Zero(3), 2), ArgumentError);
  EXPECT_THROW(masked_game(model, Vector::Zero(4), 0), ArgumentError);
  EXPECT_THROW(masked_game(model, Vector{{0.0, std::nan(""), 0.0}}, 0), ArgumentError);
}

TEST(LinearClosedForm, Examples) {
  EXPECT_EQ(linear_model_shapley(Vector{{2.0, -1.0}}, 0.3, Vector{{3.0, 4.0}}).phi, (Vector{{6.0, -4.0}}));
  const Vector x{{1.0, -2.0, 0.5}};
  EXPECT_EQ(linear_model_shapley(Vector{{1.0, 2.0, 3.0}}, 0.0, x, x).phi, Vector::Zero(3));
  EXPECT_EQ(linear_model_shapley(Vector{{2.0, -1.0}}, 0.0, Vector{{3.0, 4.0}}).method, Method::linear_closed_form);
}

TEST(LinearClosedForm, AgreesWithAllExactOracles) {
  RandomSource rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(7));  // 2..8
    const Vector w = random_vector(d, rng);
    const Vector x = random_vector(d, rng);
    const Vector baseline = random_vector(d, rng);
    const double b = rng.normal();
    const TabularModel model = TabularModel::linear(w.transpose(), Vector::Constant(1, b));
    const CoalitionGame g = masked_game(model, x, 0, MaskingRule::fixed(baseline));
    const Vector closed = linear_model_shapley(w, b, x, baseline).phi;
    EXPECT_LT(max_abs_diff(exact_shapley(g).phi, closed), 1e-10);
    EXPECT_LT(max_abs_diff(exact_random_order(g).phi, closed), 1e-10);
    EXPECT_LT(max_abs_diff(exact_least_squares(g).phi, closed), 1e-10);
  }
}

TEST(MaskedGame, BaselineChangesAttributionButKeepsEfficiency) {
  const TabularModel model = random_mlp_model(6, 2, {16}, 7);
  RandomSource rng(7);
  const Vector x = random_vector(6, rng);
  const MaskingRule other = MaskingRule::fixed(random_vector(6, rng));
  const CoalitionGame a = masked_game(model, x, 0);
  const CoalitionGame b = masked_game(model, x, 0, other);
  const Vector pa = exact_shapley(a).phi;
  const Vector pb = exact_shapley(b).phi;
  EXPECT_NE(a.v_empty(), b.v_empty());
  EXPECT_GT(max_abs_diff(pa, pb), 1e-6);
  EXPECT_NEAR(pa.sum(), model.predict(x)[0] - model.predict(Vector::Zero(6))[0], 1e-10);
  EXPECT_NEAR(pb.sum(), model.predict(x)[0] - model.predict(other.baseline)[0], 1e-10);
}

// ---------------------------------------------------------------------------

TEST(SyntheticGames, Examples) {
  const CoalitionGame u = unanimity_game(FeatureSubset::from_indices({0, 1}, 3));
  EXPECT_LT(max_abs_diff(exact_shapley(u).phi, Vector{{0.5, 0.5, 0.0}}), 1e-15);
  EXPECT_LT(max_abs_diff(exact_shapley(synthetic_game(SyntheticKind::unanimity, 3, 0)).phi, Vector{{0.5, 0.5, 0.0}}),
            1e-15);
  const Vector c{{0.5, -1.0, 2.0, 0.25}};
  EXPECT_LT(max_abs_diff(exact_shapley(additive_game(c)).phi, c), 1e-14);
  EXPECT_LT(max_abs_diff(exact_shapley(synthetic_game(SyntheticKind::glove, 3, 0)).phi, testing::glove3_shapley()),
            1e-14);
}

TEST(SyntheticGames, MajorityIsSymmetric) {
  const CoalitionGame g = synthetic_game(SyntheticKind::majority, 5, 0);
  EXPECT_EQ(g(FeatureSubset(0b00111, 5)), 1.0);
  EXPECT_EQ(g(FeatureSubset(0b00011, 5)), 0.0);
  EXPECT_LT(max_abs_diff(exact_shapley(g).phi, Vector::Constant(5, 0.2)), 1e-14);
}

TEST(SyntheticGames, RandomUniformIsReproducible) {
  const CoalitionGame a = synthetic_game(SyntheticKind::random_uniform, 10, 99);
  const CoalitionGame b = synthetic_game(SyntheticKind::random_uniform, 10, 99);
  const CoalitionGame c = synthetic_game(SyntheticKind::random_uniform, 10, 100);
  int differ = 0;
  for (FeatureSubset s : enumerate_subsets(10, true)) {
    ASSERT_EQ(a(s), b(s));
    EXPECT_GE(a(s), 0.0);
    EXPECT_LT(a(s), 1.0);
    differ += a(s) != c(s);
  }
  EXPECT_GT(differ, 1000);
  // Recorded value guards the cross-platform contract.
  EXPECT_EQ(a(FeatureSubset(0b1011, 10)), 0.4509328252031467);
}

TEST(SyntheticGames, AdditiveIsSeeded) {
  const CoalitionGame a = synthetic_game(SyntheticKind::additive, 6, 1);
  const Vector phi = exact_shapley(a).phi;
  for (int i = 0; i < 6; ++i) {
    EXPECT_DOUBLE_EQ(phi[i], a(FeatureSubset::singleton(i, 6)));
    EXPECT_LE(std::abs(phi[i]), 1.0);
  }
}

TEST(SyntheticGames, NamesAndLimits) {
  for (SyntheticKind k : {SyntheticKind::random_uniform, SyntheticKind::glove, SyntheticKind::majority,
                          SyntheticKind::additive, SyntheticKind::unanimity}) {
    EXPECT_EQ(synthetic_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(synthetic_kind_from_string("poker"), ArgumentError);
  EXPECT_THROW(synthetic_game(SyntheticKind::glove, 1, 0), ArgumentError);
  EXPECT_THROW(synthetic_game(SyntheticKind::additive, 65, 0), ArgumentError);
}

// ---------------------------------------------------------------------------

TEST(Dataset, CsvRoundTrip) {
  const TabularDataset data = synthetic_classification_dataset(30, 3, 2, 8);
  const std::string path = temp_path("roundtrip.csv");
  write_csv_dataset(path, data);
  const TabularDataset back = read_csv_dataset(path, "label");
  EXPECT_EQ(back.feature_names, data.feature_names);
  EXPECT_EQ(back.features, data.features);
  EXPECT_EQ(back.labels, data.labels);
  fs::remove(path);
}

TEST(Dataset, LabelColumnCanBeAnywhere) {
  const std::string path = temp_path("label_first.csv");
  write_file(path, "y,a,b\n1,2.5,3\n0,-1,4e2\n");
  const TabularDataset data = read_csv_dataset(path, "y");
  EXPECT_EQ(data.feature_names, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(data.features, (Matrix{{2.5, 3.0}, {-1.0, 400.0}}));
  EXPECT_EQ(data.labels, (Vector{{1.0, 0.0}}));
  fs::remove(path);
}

TEST(Dataset, DiagnosticsNameRowAndColumn) {
  const std::string path = temp_path("bad.csv");
  write_file(path, "a,b,label\n1,2,0\n3,,1\n");
  try {
    read_csv_dataset(path, "label");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("row 3"), std::string::npos) << what;
    EXPECT_NE(what.find("'b'"), std::string::npos) << what;
  }
  write_file(path, "a,b,label\n1,x,0\n");
  EXPECT_THROW(read_csv_dataset(path, "label"), DataError);
  write_file(path, "a,b,label\n1,2\n");
  EXPECT_THROW(read_csv_dataset(path, "label"), DataError);
  EXPECT_THROW(read_csv_dataset(path, "target"), DataError);
  fs::remove(path);
  try {
    read_csv_dataset("/nonexistent/data.csv", "label");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/data.csv"), std::string::npos);
  }
}

TEST(Classifier, LinearRecoversWeights) {
  Vector w;
  double b = 0.0;
  const TabularDataset data = synthetic_linear_dataset(500, 5, 9, &w, &b);
  const TabularModel m = train_tabular_classifier(data, ModelKind::linear, {});
  EXPECT_LT(max_abs_diff(m.weights().row(0).transpose(), w), 1e-3);
  EXPECT_NEAR(m.bias()[0], b, 1e-3);
  EXPECT_EQ(m.metadata().at("trainer"), "least_squares");
}

TEST(Classifier, LogisticSeparatesClusters) {
  const TabularDataset data = synthetic_classification_dataset(400, 4, 2, 10);
  ClassifierHyper hyper;
  hyper.seed = 3;
  const TabularModel m = train_tabular_classifier(data, ModelKind::logistic, hyper);
  EXPECT_GE(accuracy(m, data), 0.99);
}

TEST(Classifier, MlpBeatsMajorityAndIsDeterministic) {
  const TabularDataset data = synthetic_classification_dataset(300, 4, 3, 11, 2.0);
  ClassifierHyper hyper;
  hyper.epochs = 60;
  hyper.seed = 4;
  hyper.mask_augmentation = true;
  const TabularModel a = train_tabular_classifier(data, ModelKind::mlp, hyper);
  const TabularModel b = train_tabular_classifier(data, ModelKind::mlp, hyper);
  EXPECT_GT(accuracy(a, data), 0.5);
  EXPECT_EQ(a.network().parameters(), b.network().parameters());
  EXPECT_EQ(a.metadata().at("mask_distribution"), "uniform_size");
}

TEST(Classifier, RejectsDegenerateLabels) {
  TabularDataset data = synthetic_classification_dataset(40, 3, 2, 12);
  data.labels.setZero();
  EXPECT_THROW(train_tabular_classifier(data, ModelKind::logistic, {}), DataError);
  TabularDataset few = synthetic_classification_dataset(15, 3, 2, 12);
  EXPECT_THROW(train_tabular_classifier(few, ModelKind::logistic, {}), DataError);
  TabularDataset fractional = synthetic_classification_dataset(40, 3, 2, 12);
  fractional.labels[0] = 0.5;
  EXPECT_THROW(train_tabular_classifier(fractional, ModelKind::mlp, {}), DataError);
}

TEST(RandomMlp, SeededAndFinite) {
  const TabularModel a = random_mlp_model(64, 2, {32, 32}, 13);
  const TabularModel b = random_mlp_model(64, 2, {32, 32}, 13);
  EXPECT_EQ(a.network().parameters(), b.network().parameters());
  RandomSource rng(13);
  const Vector p = a.predict(random_vector(64, rng));
  EXPECT_TRUE(p.allFinite());
  EXPECT_NEAR(p.sum(), 1.0, 1e-12);
  EXPECT_EQ(a.metadata().at("trainer"), "random_init");
}

}  // namespace
}  // namespace shapx

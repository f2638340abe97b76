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
#include <limits>
#include <sstream>
#include <cstring>
#include <unistd.h>

#include "shapx/errors.hpp"
#include "shapx/io.hpp"

namespace shapx {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("shapx_io_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

TEST(Base64, KnownVectors) {
  const auto bytes = [](const std::string& s) { return std::vector<unsigned char>(s.begin(), s.end()); };
  EXPECT_EQ(base64_encode(bytes("")), "");
  EXPECT_EQ(base64_encode(bytes("f")), "Zg==");
  EXPECT_EQ(base64_encode(bytes("fo")), "Zm8=");
  EXPECT_EQ(base64_encode(bytes("foobar")), "Zm9vYmFy");
  EXPECT_EQ(base64_decode("Zm9vYg=="), bytes("foob"));
  EXPECT_THROW(base64_decode("Zm9"), DataError);
  EXPECT_THROW(base64_decode("Zm9*"), DataError);
}

TEST(Base64, DoublesAreBitExact) {
  RandomSource rng(1);
  Vector v(64);
  for (int i = 0; i < 64; ++i) v[i] = rng.normal() * std::pow(10.0, rng.below(40) - 20.0);
  v[0] = std::numeric_limits<double>::denorm_min();
  v[1] = -0.0;
  const Vector back = decode_doubles(encode_doubles(v));
  ASSERT_EQ(back.size(), v.size());
  EXPECT_EQ(std::memcmp(back.data(), v.data(), sizeof(double) * 64), 0);
  Json bad = encode_doubles(v);
  bad["count"] = 63;
  EXPECT_THROW(decode_doubles(bad), DataError);
}

TEST(FormatDouble, RoundTripsAtSeventeenDigits) {
  RandomSource rng(2);
  for (int k = 0; k < 1000; ++k) {
    const double v = rng.normal() * std::exp(rng.normal() * 10.0);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST_F(IoTest, AttributionRoundTrip) {
  Attribution a;
  a.phi = Vector{{0.1, -2.0 / 3.0, 1e-300}};
  a.method = Method::kernelshap;
  a.samples_used = 2048;
  a.seed = 18446744073709551557ull;
  write_json(path("a.json"), attribution_json(a, 0.25, 1.5, 3.0));
  const Json j = read_json(path("a.json"));
  EXPECT_EQ(j["d"], 3);
  EXPECT_EQ(j["v_empty"], 0.25);
  EXPECT_EQ(j["elapsed_ms"], 3.0);
  const Attribution b = attribution_from_json(j);
  EXPECT_EQ(b.phi, a.phi);
  EXPECT_EQ(b.method, a.method);
  EXPECT_EQ(b.samples_used, a.samples_used);
  EXPECT_EQ(b.seed, a.seed);
  EXPECT_FALSE(attribution_json(a, 0.0, 0.0, std::nullopt).contains("elapsed_ms"));
  Json bad = j;
  bad["d"] = 4;
  EXPECT_THROW(attribution_from_json(bad), DataError);
  bad.erase("phi");
  EXPECT_THROW(attribution_from_json(bad), DataError);
}

TEST_F(IoTest, TrainConfigRoundTrip) {
  TrainConfig cfg;
  cfg.learning_rate = 3e-4;
  cfg.batch_size = 17;
  cfg.epochs = 9;
  cfg.samples = 66;
  cfg.validation_samples = 500;
  cfg.paired = true;
  cfg.optimizer = OptimizerKind::sgd;
  cfg.weight_decay = 1e-5;
  cfg.seed = 99;
  cfg.validation_fraction = 0.2;
  cfg.patience = 4;
  cfg.all_classes = true;
  cfg.cosine_schedule = false;
  cfg.averaging = 0.99;
  cfg.normalize = false;
  cfg.metric = MetricMatrix::explicit_matrix(Matrix{{2.0, 0.5}, {0.5, 1.0}});
  cfg.workers = 3;
  const TrainConfig back = train_config_from_json(train_config_json(cfg));
  EXPECT_EQ(train_config_json(back), train_config_json(cfg));
  EXPECT_EQ(back.metric.entries, cfg.metric.entries);
  EXPECT_EQ(back.optimizer, OptimizerKind::sgd);
  EXPECT_EQ(back.describe(), cfg.describe());
}

TEST_F(IoTest, ExplainerCheckpointIsBitExact) {
  const ExplainerNet net =
      ExplainerNet::create(5, 5, 3, ExplainerKind::fastshap, {7, 6}, Activation::elu, 42);
  Json config = {{"epochs", 3}};
  save_explainer(path("net.json"), net, config);
  const ExplainerCheckpoint back = load_explainer(path("net.json"));
  EXPECT_EQ(back.net.players, 5);
  EXPECT_EQ(back.net.classes, 3);
  EXPECT_EQ(back.net.kind, ExplainerKind::fastshap);
  EXPECT_EQ(back.net.mlp.activation(), Activation::elu);
  EXPECT_EQ(back.net.mlp.parameters(), net.mlp.parameters());
  EXPECT_EQ(back.config, config);
  const Vector x = Vector::LinSpaced(5, -1.0, 1.0);
  EXPECT_EQ(back.net.forward(x), net.forward(x));
}

TEST_F(IoTest, ModelCheckpointsAreBitExact) {
  const TabularModel mlp = random_mlp_model(6, 3, {8}, 5);
  save_model(path("mlp.json"), mlp);
  const TabularModel mlp_back = load_model(path("mlp.json"));
  const Vector x = Vector::LinSpaced(6, -2.0, 3.0);
  EXPECT_EQ(mlp_back.kind(), ModelKind::mlp);
  EXPECT_EQ(mlp_back.predict(x), mlp.predict(x));

  const TabularModel logistic = TabularModel::logistic(Matrix{{1.0, -1.0 / 3.0}, {0.5, 2.0}}, Vector{{0.1, -0.2}});
  save_model(path("log.json"), logistic);
  const TabularModel log_back = load_model(path("log.json"));
  EXPECT_EQ(log_back.kind(), ModelKind::logistic);
  EXPECT_EQ(log_back.weights(), logistic.weights());
  EXPECT_EQ(log_back.bias(), logistic.bias());
}

TEST_F(IoTest, CheckpointTypeIsChecked) {
  save_model(path("m.json"), TabularModel::linear(Matrix{{1.0}}, Vector{{0.0}}));
  EXPECT_THROW(load_explainer(path("m.json")), DataError);
  write_json(path("other.json"), Json{{"hello", 1}});
  EXPECT_THROW(load_model(path("other.json")), DataError);
}

TEST_F(IoTest, MissingAndMalformedFilesNameThePath) {
  const std::string missing = path("nope.json");
  try {
    (void)read_json(missing);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(missing), std::string::npos);
  }
  {
    std::ofstream(path("bad.json")) << "{ not json";
  }
  try {
    (void)load_model(path("bad.json"));
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(path("bad.json")), std::string::npos);
  }
  EXPECT_THROW(write_json((dir_ / "no" / "such" / "dir.json").string(), Json::object()), DataError);
}

TEST_F(IoTest, CsvWriters) {
  CurveReport c;
  c.fractions = {0.0, 0.5, 1.0};
  c.scores = {0.0, 0.1, 1.0};
  write_curve_csv(path("curve.csv"), c);
  EXPECT_EQ(slurp(path("curve.csv")), "fraction,score\n0,0\n0.5,0.10000000000000001\n1,1\n");

  write_loss_csv(path("loss.csv"), {{1, 2.0, std::numeric_limits<double>::quiet_NaN()}});
  EXPECT_EQ(slurp(path("loss.csv")), "epoch,train_loss,validation_loss\n1,2,nan\n");
  write_loss_csv(path("empty.csv"), {});
  EXPECT_EQ(slurp(path("empty.csv")), "epoch,train_loss,validation_loss\n");

  ConvergenceRow row;
  row.samples = 64;
  row.mean_l1 = 1.0;
  row.std_l1 = 0.5;
  row.mean_l2 = 0.25;
  row.std_l2 = 0.125;
  write_convergence_csv(path("conv.csv"), {row});
  EXPECT_EQ(slurp(path("conv.csv")), "samples,mean_l1,std_l1,mean_l2,std_l2\n64,1,0.5,0.25,0.125\n");

  DistanceReport d;
  d.l1_per_instance = {3.0};
  d.l2_per_instance = {2.0};
  write_distance_csv(path("dist.csv"), d);
  EXPECT_EQ(slurp(path("dist.csv")), "instance,l1,l2\n0,3,2\n");
}

TEST(Json, ReportShapes) {
  const EnvironmentFingerprint env = environment_fingerprint(2);
  TimingRow t;
  t.name = "x";
  t.runs = 10;
  t.median_ms = 1.0;
  t.p95_ms = 2.0;
  const Json j = timing_json({t}, env);
  EXPECT_EQ(j["environment"]["workers"], 2);
  EXPECT_EQ(j["methods"][0]["name"], "x");
  CurveReport c;
  c.mode = CurveMode::deletion;
  c.fractions = {0.0, 1.0};
  c.scores = c.raw_scores = {1.0, 0.0};
  c.auc = 0.5;
  c.normalized = true;
  const Json cj = curve_json(c);
  EXPECT_EQ(cj["mode"], "deletion");
  EXPECT_EQ(cj["auc"], 0.5);
}

}  // namespace
}  // namespace shapx

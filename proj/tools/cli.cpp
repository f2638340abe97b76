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

#include "cli.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "shapx/amortized.hpp"
#include "shapx/eval.hpp"
#include "shapx/exact.hpp"
#include "shapx/io.hpp"
#include "shapx/models.hpp"
#include "shapx/parallel.hpp"
#include "shapx/stochastic.hpp"

namespace shapx::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Shared options
// ---------------------------------------------------------------------------

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  int workers = default_workers();
  bool omit_timing = false;
  CLI::Option* seed_option = nullptr;
};

void add_common(CLI::App* sub, Common& c) {
  c.seed_option = sub->add_option("--seed", c.seed, "Random seed; falls back to $SHAPX_SEED, then 0");
  sub->add_option("--out", c.out, "Output file (exact, estimate) or directory (train, eval, bench)");
  sub->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_flag("--omit-timing", c.omit_timing, "Leave wall-clock fields out of outputs");
}

/// Applies the SHAPX_SEED fallback and records the resolved seed on the option so the emitted
/// config carries it.
void resolve_seed(Common& c) {
  if (c.seed_option->count() > 0) return;
  if (const char* env = std::getenv("SHAPX_SEED"); env != nullptr && *env != '\0') {
    const std::string_view text(env);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw ArgumentError("SHAPX_SEED must be a non-negative integer, got '" + std::string(text) + "'");
    }
    c.seed = value;
  }
  c.seed_option->add_result(std::to_string(c.seed));
}

struct GameOptions {
  std::string game;
  int players = 0;
  std::vector<double> coefficients;
  std::vector<int> carrier;
  std::string dataset;
  std::string label = "label";
  std::string model;
  int row = 0;
  int cls = -1;
  std::string baseline = "zeros";
};

void add_game_options(CLI::App* sub, GameOptions& g) {
  sub->add_option("--game", g.game, "Built-in game: glove, majority, additive, unanimity, random_uniform");
  sub->add_option("--players", g.players, "Player count for built-in games");
  sub->add_option("--coefficients", g.coefficients, "Additive game coefficients, comma separated")->delimiter(',');
  sub->add_option("--carrier", g.carrier, "Unanimity game carrier, comma separated")->delimiter(',');
  sub->add_option("--dataset", g.dataset, "CSV dataset for a masked-model game");
  sub->add_option("--label", g.label, "Label column of the dataset")->capture_default_str();
  sub->add_option("--model", g.model, "Model checkpoint for the masked-model game");
  sub->add_option("--row", g.row, "Dataset row to explain")->capture_default_str();
  sub->add_option("--class", g.cls, "Class to explain; -1 selects the predicted class")->capture_default_str();
  sub->add_option("--baseline", g.baseline, "Masking baseline: zeros or mean")->capture_default_str();
}

MaskingRule masking_rule(const std::string& name, const Matrix& features) {
  if (name == "zeros") return MaskingRule::zeros();
  if (name == "mean") return MaskingRule::training_mean(features);
  throw ArgumentError("unknown baseline '" + name + "' (expected zeros or mean)");
}

struct ResolvedGame {
  std::optional<CoalitionGame> game;
  std::shared_ptr<const TabularModel> model;
  Vector x;
  int cls = 0;
  MaskingRule rule;
};

ResolvedGame resolve_game(const GameOptions& g, std::uint64_t seed) {
  ResolvedGame r;
  if (!g.game.empty() && !g.dataset.empty()) throw ArgumentError("--game and --dataset are mutually exclusive");
  if (!g.game.empty()) {
    const SyntheticKind kind = synthetic_kind_from_string(g.game);
    if (g.players < 0 || g.players > kMaxPlayers) throw ArgumentError("--players must be in 1..64");
    switch (kind) {
      case SyntheticKind::additive:
        if (!g.coefficients.empty()) {
          if (g.players != 0 && g.players != static_cast<int>(g.coefficients.size())) {
            throw ArgumentError("--players disagrees with the number of --coefficients");
          }
          r.game = additive_game(Eigen::Map<const Vector>(g.coefficients.data(), static_cast<Eigen::Index>(g.coefficients.size())));
        } else {
          r.game = synthetic_game(kind, g.players == 0 ? 3 : g.players, seed);
        }
        break;
      case SyntheticKind::unanimity: {
        const std::vector<int> carrier = g.carrier.empty() ? std::vector<int>{0, 1} : g.carrier;
        int needed = 1;
        for (int i : carrier) {
          if (i < 0 || i >= kMaxPlayers) throw ArgumentError("--carrier entries must be in 0..63");
          needed = std::max(needed, i + 1);
        }
        const int d = g.players == 0 ? std::max(3, needed) : g.players;
        if (needed > d) throw ArgumentError("--carrier names a player outside 0..players-1");
        r.game = unanimity_game(FeatureSubset::from_indices(carrier, d));
        break;
      }
      case SyntheticKind::random_uniform:
        r.game = synthetic_game(kind, g.players == 0 ? 8 : g.players, seed);
        break;
      default:
        r.game = synthetic_game(kind, g.players == 0 ? 3 : g.players, seed);
        break;
    }
    return r;
  }
  if (g.dataset.empty()) throw ArgumentError("one of --game or --dataset is required");
  const TabularDataset data = read_csv_dataset(g.dataset, g.label);
  if (g.model.empty()) throw ArgumentError("--dataset needs --model (a checkpoint written by `shapx train`)");
  r.model = std::make_shared<const TabularModel>(load_model(g.model));
  if (r.model->input_width() != data.width()) {
    throw DataError("model '" + g.model + "' expects " + std::to_string(r.model->input_width()) +
                    " features, dataset '" + g.dataset + "' has " + std::to_string(data.width()));
  }
  if (g.row < 0 || g.row >= data.rows()) {
    throw ArgumentError("--row " + std::to_string(g.row) + " outside 0.." + std::to_string(data.rows() - 1));
  }
  r.x = data.features.row(g.row).transpose();
  r.cls = g.cls < 0 ? r.model->predicted_class(r.x) : g.cls;
  r.rule = masking_rule(g.baseline, data.features);
  r.game = masked_game(r.model, r.x, r.cls, r.rule);
  return r;
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
}

/// Writes `j` to `path`, or to stdout when `path` is empty.
void emit_json(const std::string& path, const Json& j, std::ostream& out) {
  if (path.empty()) {
    out << j.dump(2) << '\n';
  } else {
    write_json(path, j);
  }
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory '" + dir + "': " + ec.message());
}

/// The active subcommand's resolved options as a TOML section that `--config` reads back.
std::string resolved_config(const CLI::App& sub) {
  return "[" + sub.get_name() + "]\n" + sub.config_to_str(true, false);
}

// ---------------------------------------------------------------------------
// exact / estimate
// ---------------------------------------------------------------------------

struct ExactOptions {
  Common common;
  GameOptions game;
  std::string method = "shapley";
};

int cmd_exact(const CLI::App& app, ExactOptions& o, std::ostream& out) {
  resolve_seed(o.common);
  const ResolvedGame r = resolve_game(o.game, o.common.seed);
  const CoalitionGame& game = *r.game;
  const auto t0 = Clock::now();
  Attribution a;
  if (o.method == "shapley") {
    a = exact_shapley(game);
  } else if (o.method == "random_order") {
    a = exact_random_order(game);
  } else if (o.method == "least_squares") {
    a = exact_least_squares(game);
  } else if (o.method.rfind("unified:", 0) == 0) {
    a = exact_unified_expectation(UnifiedStochasticConfig::by_name(o.method.substr(8), game.d()), game);
  } else {
    throw ArgumentError("unknown exact method '" + o.method +
                        "' (expected shapley, random_order, least_squares or unified:<row>)");
  }
  const double ms = elapsed_ms(t0);
  a.seed = o.common.seed;
  const std::optional<double> timing = o.common.omit_timing ? std::nullopt : std::optional<double>(ms);
  emit_json(o.common.out, attribution_json(a, game.v_empty(), game.v_full(), timing), out);
  if (!o.common.out.empty()) write_text(o.common.out + ".config.toml", resolved_config(app));
  return kExitOk;
}

struct EstimateOptions {
  Common common;
  GameOptions game;
  std::string method = "kernelshap";
  std::int64_t samples = 1024;
  bool paired = false;
};

void check_paired(const std::string& method, bool paired) {
  if (!paired) return;
  if (method == "kernelshap" || method == "simshap-sample" || method == "unified:lsv" || method == "unified:simshap") {
    return;
  }
  throw ArgumentError("--paired is not supported by method '" + method + "'");
}

int cmd_estimate(const CLI::App& app, EstimateOptions& o, std::ostream& out) {
  resolve_seed(o.common);
  if (o.samples < 1) throw ArgumentError("--samples must be >= 1, got " + std::to_string(o.samples));
  check_paired(o.method, o.paired);
  const Estimator estimator = make_estimator(o.method, o.paired);
  const ResolvedGame r = resolve_game(o.game, o.common.seed);
  const CoalitionGame& game = *r.game;
  RandomSource rng(o.common.seed);
  const auto t0 = Clock::now();
  Attribution a = estimator(game, o.samples, rng);
  const double ms = elapsed_ms(t0);
  a.seed = o.common.seed;
  Json j = attribution_json(a, game.v_empty(), game.v_full(),
                            o.common.omit_timing ? std::nullopt : std::optional<double>(ms));
  j["estimator"] = {{"id", o.method}, {"samples", o.samples}, {"paired", o.paired}};
  emit_json(o.common.out, j, out);
  if (!o.common.out.empty()) write_text(o.common.out + ".config.toml", resolved_config(app));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainOptions {
  Common common;
  std::string method = "simshap";
  std::string dataset;
  std::string label = "label";
  std::string synthetic;
  int rows = 2000;
  int features = 8;
  int classes = 2;
  std::string model;
  std::string model_kind = "auto";
  std::string baseline = "zeros";
  bool mask_augmentation = false;
  int epochs = 100;
  double lr = 1e-3;
  int batch = 32;
  std::int64_t samples = 32;
  std::int64_t validation_samples = 0;
  bool paired = false;
  std::string optimizer = "adamw";
  double weight_decay = 0.0;
  double validation_fraction = 0.1;
  int patience = 0;
  bool all_classes = false;
  bool cosine = true;
  bool normalize = true;
  double averaging = 0.0;
  std::string metric = "identity";
  std::vector<int> hidden;
  std::string activation = "relu";
};

int cmd_train(const CLI::App& app, TrainOptions& o, std::ostream& out) {
  resolve_seed(o.common);
  const ExplainerKind kind = explainer_kind_from_string(o.method);
  const std::string dir = o.common.out.empty() ? std::string("shapx-train") : o.common.out;

  TrainConfig cfg;
  cfg.learning_rate = o.lr;
  cfg.batch_size = o.batch;
  cfg.epochs = o.epochs;
  cfg.samples = o.samples;
  cfg.validation_samples = o.validation_samples;
  cfg.paired = o.paired;
  cfg.optimizer = optimizer_from_string(o.optimizer);
  cfg.weight_decay = o.weight_decay;
  cfg.seed = o.common.seed;
  cfg.validation_fraction = o.validation_fraction;
  cfg.patience = o.patience;
  cfg.all_classes = o.all_classes;
  cfg.cosine_schedule = o.cosine;
  cfg.normalize = o.normalize;
  cfg.averaging = o.averaging;
  cfg.metric.kind = metric_kind_from_string(o.metric);
  if (cfg.metric.kind == MetricKind::explicit_matrix) throw ArgumentError("--metric explicit is library-only");
  cfg.workers = o.common.workers;
  cfg.validate();

  // Data.
  TabularDataset data;
  Vector true_weights;
  double true_bias = 0.0;
  if (!o.dataset.empty() && !o.synthetic.empty()) throw ArgumentError("--dataset and --synthetic are mutually exclusive");
  if (!o.dataset.empty()) {
    data = read_csv_dataset(o.dataset, o.label);
  } else if (o.synthetic == "linear") {
    data = synthetic_linear_dataset(o.rows, o.features, o.common.seed, &true_weights, &true_bias);
  } else if (o.synthetic == "classification") {
    data = synthetic_classification_dataset(o.rows, o.features, o.classes, o.common.seed);
  } else if (o.synthetic.empty()) {
    throw ArgumentError("one of --dataset or --synthetic {linear,classification} is required");
  } else {
    throw ArgumentError("unknown synthetic dataset '" + o.synthetic + "'");
  }

  ensure_directory(dir);
  if (!o.synthetic.empty()) write_csv_dataset((fs::path(dir) / "dataset.csv").string(), data);

  // Black box.
  std::shared_ptr<const TabularModel> model;
  if (!o.model.empty()) {
    model = std::make_shared<const TabularModel>(load_model(o.model));
    if (model->input_width() != data.width()) throw DataError("model '" + o.model + "' width disagrees with the dataset");
  } else {
    std::string kind_name = o.model_kind;
    if (kind_name == "auto") kind_name = o.synthetic == "linear" ? "linear" : "mlp";
    const ModelKind mk = model_kind_from_string(kind_name);
    if (mk == ModelKind::linear && o.synthetic == "linear") {
      model = std::make_shared<const TabularModel>(
          TabularModel::linear(true_weights.transpose(), Vector::Constant(1, true_bias)));
    } else {
      ClassifierHyper hyper;
      hyper.seed = o.common.seed;
      hyper.mask_augmentation = o.mask_augmentation;
      model = std::make_shared<const TabularModel>(train_tabular_classifier(data, mk, hyper));
    }
    save_model((fs::path(dir) / "model.json").string(), *model);
  }

  const MaskingRule rule = masking_rule(o.baseline, data.features);
  ExplainerDataset ed;
  ed.inputs = data.features;
  for (int r = 0; r < data.rows(); ++r) {
    ed.classes.push_back(model->classes() > 1 ? model->predicted_class(data.features.row(r).transpose()) : 0);
  }
  const GameFactory factory = [&](const Vector& x, int cls) { return masked_game(model, x, cls, rule); };

  const std::vector<int> hidden = o.hidden.empty() ? default_explainer_hidden(data.width()) : o.hidden;
  const ExplainerNet init = ExplainerNet::create(data.width(), data.width(), model->classes(), kind, hidden,
                                                 activation_from_string(o.activation), o.common.seed);
  const auto t0 = Clock::now();
  const TrainResult result =
      kind == ExplainerKind::simshap ? train_simshap(init, ed, factory, cfg) : train_fastshap(init, ed, factory, cfg);
  const double ms = elapsed_ms(t0);

  save_explainer((fs::path(dir) / "checkpoint.json").string(), result.net, train_config_json(cfg));
  write_loss_csv((fs::path(dir) / "loss.csv").string(), result.history);
  write_text((fs::path(dir) / "config.toml").string(), resolved_config(app));

  // Attributions on the validation rows.
  Json attributions = Json::array();
  double err = 0.0;
  double norm = 0.0;
  double max_gap = 0.0;
  const bool closed_form = model->kind() == ModelKind::linear && model->classes() == 1;
  for (int r : result.validation_rows) {
    const Vector x = data.features.row(r).transpose();
    const int cls = ed.class_of(r);
    Vector v_all(model->classes());
    for (int k = 0; k < model->classes(); ++k) {
      const CoalitionGame g = masked_game(model, x, k, rule);
      v_all[k] = g.v_all();
    }
    const Attribution a = amortized_inference(result.net, x, v_all)[static_cast<std::size_t>(cls)];
    if (kind == ExplainerKind::fastshap) max_gap = std::max(max_gap, std::abs(a.phi.sum() - v_all[cls]));
    if (closed_form) {
      const Vector truth = linear_model_shapley(model->weights().row(0).transpose(), model->bias()[0], x,
                                                rule.baseline_for(data.width()))
                               .phi;
      err += (a.phi - truth).norm();
      norm += truth.norm();
    }
    attributions.push_back({{"row", r}, {"class", cls}, {"phi", std::vector<double>(a.phi.data(), a.phi.data() + a.phi.size())}, {"v_all", v_all[cls]}});
  }
  write_json((fs::path(dir) / "validation_attributions.json").string(), attributions);

  Json report;
  report["method"] = o.method;
  report["epochs_run"] = result.history.size();
  report["early_stopped"] = result.early_stopped;
  report["final_train_loss"] = result.history.empty() ? Json(nullptr) : Json(result.history.back().train);
  report["final_validation_loss"] =
      result.history.empty() || std::isnan(result.history.back().validation) ? Json(nullptr)
                                                                             : Json(result.history.back().validation);
  std::vector<double> val;
  for (const auto& h : result.history) val.push_back(h.validation);
  report["validation_ma20_non_increasing"] = moving_average_non_increasing(val, 20);
  if (closed_form && norm > 0.0) report["relative_l2_to_closed_form"] = err / norm;
  if (kind == ExplainerKind::fastshap) report["max_efficiency_gap"] = max_gap;
  if (!o.common.omit_timing) report["elapsed_ms"] = ms;
  write_json((fs::path(dir) / "report.json").string(), report);
  out << "wrote " << dir << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchOptions {
  Common common;
  int players = 64;
  std::int64_t samples = 2048;
  int runs = 10;
  int warmup = 3;
  std::vector<int> black_box_hidden = {512, 512, 512};
  std::string checkpoint;
};

/// `standalone` is false under eval, which already owns --players and takes --bench-samples.
void add_bench_options(CLI::App* sub, BenchOptions& o, bool standalone) {
  if (standalone) {
    sub->add_option("--players", o.players, "Feature count of the synthetic black box")->capture_default_str();
    sub->add_option("--samples", o.samples, "KernelSHAP samples")->capture_default_str();
  } else {
    sub->add_option("--bench-samples", o.samples, "KernelSHAP samples (bench)")->capture_default_str();
  }
  sub->add_option("--runs", o.runs, "Timed runs per method (>= 10)")->capture_default_str();
  sub->add_option("--warmup", o.warmup, "Discarded warmup runs (>= 3)")->capture_default_str();
  sub->add_option("--black-box-hidden", o.black_box_hidden, "Hidden widths of the synthetic black box")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--checkpoint", o.checkpoint, "Explainer checkpoint to time instead of a fresh SimSHAP net");
}

Json run_bench(BenchOptions& o) {
  if (o.players < 2 || o.players > kMaxPlayers) throw ArgumentError("--players must be in 2..64");
  if (o.samples < o.players) throw ArgumentError("--samples must be >= --players for KernelSHAP");
  auto model = std::make_shared<const TabularModel>(random_mlp_model(o.players, 2, o.black_box_hidden, o.common.seed));
  RandomSource rng(o.common.seed, 0xBE);
  Vector x(o.players);
  for (int i = 0; i < o.players; ++i) x[i] = rng.normal();
  const CoalitionGame game = masked_game(model, x, 0);

  ExplainerNet net;
  if (!o.checkpoint.empty()) {
    net = load_explainer(o.checkpoint).net;
    if (net.input_width() != o.players) throw DataError("checkpoint '" + o.checkpoint + "' input width differs from --players");
  } else {
    net = ExplainerNet::create(o.players, o.players, 2, ExplainerKind::simshap, default_explainer_hidden(o.players),
                               Activation::relu, o.common.seed);
  }
  const Vector v_all = Vector::Constant(net.classes, game.v_all());
  std::vector<BenchmarkCase> cases{
      {"amortized_inference", [&] { (void)amortized_inference(net, x, v_all); }},
      {"kernelshap", [&] {
         RandomSource r(o.common.seed);
         (void)estimate_kernelshap(game, o.samples, r);
       }}};
  const auto rows = benchmark_timing(cases, o.warmup, o.runs);
  Json j = timing_json(rows, environment_fingerprint(o.common.workers));
  j["players"] = o.players;
  j["samples"] = o.samples;
  j["black_box_hidden"] = o.black_box_hidden;
  j["ratio"] = rows[1].median_ms / rows[0].median_ms;
  return j;
}

int cmd_bench(const CLI::App& app, BenchOptions& o, std::ostream& out) {
  resolve_seed(o.common);
  const Json j = run_bench(o);
  const std::string dir = o.common.out;
  if (dir.empty()) {
    out << j.dump(2) << '\n';
  } else {
    ensure_directory(dir);
    write_json((fs::path(dir) / "bench.json").string(), j);
    write_text((fs::path(dir) / "config.toml").string(), resolved_config(app));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalOptions {
  Common common;
  GameOptions game;
  std::string metric = "l1l2";
  std::string estimate;
  std::string truth;
  std::string attribution;
  std::string method = "kernelshap";
  bool paired = false;
  std::vector<std::int64_t> grid = {256, 1024, 4096, 16384};
  int seeds = 20;
  BenchOptions bench;
};

int cmd_eval(const CLI::App& app, EvalOptions& o, std::ostream& out) {
  resolve_seed(o.common);
  const std::string dir = o.common.out.empty() ? std::string("shapx-eval") : o.common.out;
  Json report;
  report["metric"] = o.metric;
  auto finish = [&](const Json& j) {
    ensure_directory(dir);
    write_json((fs::path(dir) / "report.json").string(), j);
    write_text((fs::path(dir) / "config.toml").string(), resolved_config(app));
    out << "wrote " << dir << '\n';
    return kExitOk;
  };

  if (o.metric == "l1l2") {
    if (o.estimate.empty() || o.truth.empty()) throw ArgumentError("--metric l1l2 needs --estimate and --truth");
    const Attribution est = attribution_from_json(read_json(o.estimate));
    const Attribution truth = attribution_from_json(read_json(o.truth));
    const DistanceReport d = attribution_distance(est, truth);
    report["distance"] = distance_json(d);
    ensure_directory(dir);
    write_distance_csv((fs::path(dir) / "report.csv").string(), d);
    return finish(report);
  }
  if (o.metric == "insertion" || o.metric == "deletion") {
    const ResolvedGame r = resolve_game(o.game, o.common.seed);
    const Vector phi = o.attribution.empty() ? exact_shapley(*r.game).phi
                                             : attribution_from_json(read_json(o.attribution)).phi;
    const CurveReport c = insertion_deletion(*r.game, phi, curve_mode_from_string(o.metric));
    report["curve"] = curve_json(c);
    ensure_directory(dir);
    write_curve_csv((fs::path(dir) / "curve.csv").string(), c);
    return finish(report);
  }
  if (o.metric == "convergence") {
    if (o.seeds < 1) throw ArgumentError("--seeds must be >= 1");
    for (auto M : o.grid) {
      if (M < 1) throw ArgumentError("--grid entries must be >= 1");
    }
    check_paired(o.method, o.paired);
    const ResolvedGame r = resolve_game(o.game, o.common.seed);
    if (r.game->d() > kMaxExactShapleyPlayers) throw CapacityError("convergence needs an exact oracle (d <= 20)");
    const auto rows =
        convergence_probe(make_estimator(o.method, o.paired), *r.game, o.grid, o.seeds, o.common.seed, o.common.workers);
    bool monotone = true;
    for (std::size_t k = 1; k < rows.size(); ++k) monotone = monotone && rows[k].mean_l2 <= rows[k - 1].mean_l2;
    report["method"] = o.method;
    report["paired"] = o.paired;
    report["seeds"] = o.seeds;
    report["rows"] = convergence_json(rows);
    report["monotone_mean_l2"] = monotone;
    ensure_directory(dir);
    write_convergence_csv((fs::path(dir) / "report.csv").string(), rows);
    return finish(report);
  }
  if (o.metric == "bench") {
    o.bench.common = o.common;
    if (o.game.players != 0) o.bench.players = o.game.players;
    report["bench"] = run_bench(o.bench);
    report["ratio"] = report["bench"]["ratio"];
    return finish(report);
  }
  throw ArgumentError("unknown metric '" + o.metric + "' (expected l1l2, insertion, deletion, convergence, bench)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"shapx: Shapley value estimation toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML configuration; command-line flags take precedence");
  app.fallthrough();

  ExactOptions exact;
  CLI::App* exact_cmd = app.add_subcommand("exact", "Exact Shapley values by enumeration");
  add_common(exact_cmd, exact.common);
  add_game_options(exact_cmd, exact.game);
  exact_cmd->add_option("--method", exact.method, "shapley, random_order, least_squares or unified:<sv|lsv|simshap>")
      ->capture_default_str();

  EstimateOptions estimate;
  CLI::App* estimate_cmd = app.add_subcommand("estimate", "Stochastic Shapley value estimates");
  add_common(estimate_cmd, estimate.common);
  add_game_options(estimate_cmd, estimate.game);
  estimate_cmd->add_option("--method", estimate.method, "Estimator id")->capture_default_str();
  estimate_cmd->add_option("--samples", estimate.samples, "Sample budget M")->capture_default_str();
  estimate_cmd->add_flag("--paired", estimate.paired, "Paired (S, N \\ S) sampling");

  TrainOptions train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train an amortized explainer (simshap or fastshap)");
  add_common(train_cmd, train.common);
  train_cmd->add_option("--method", train.method, "simshap or fastshap")->capture_default_str();
  train_cmd->add_option("--dataset", train.dataset, "CSV dataset");
  train_cmd->add_option("--label", train.label, "Label column")->capture_default_str();
  train_cmd->add_option("--synthetic", train.synthetic, "Built-in dataset: linear or classification");
  train_cmd->add_option("--rows", train.rows, "Rows of the synthetic dataset")->capture_default_str();
  train_cmd->add_option("--features", train.features, "Features of the synthetic dataset")->capture_default_str();
  train_cmd->add_option("--classes", train.classes, "Classes of the synthetic classification dataset")
      ->capture_default_str();
  train_cmd->add_option("--model", train.model, "Black-box model checkpoint; trained in-run when absent");
  train_cmd->add_option("--model-kind", train.model_kind, "auto, linear, logistic or mlp")->capture_default_str();
  train_cmd->add_option("--baseline", train.baseline, "Masking baseline: zeros or mean")->capture_default_str();
  train_cmd->add_flag("--mask-augmentation", train.mask_augmentation, "Train the in-run black box on randomly masked rows");
  train_cmd->add_option("--epochs", train.epochs, "Epochs")->capture_default_str();
  train_cmd->add_option("--lr", train.lr, "Learning rate")->capture_default_str();
  train_cmd->add_option("--batch", train.batch, "Batch size")->capture_default_str();
  train_cmd->add_option("--samples", train.samples, "Subsets per input per epoch")->capture_default_str();
  train_cmd->add_option("--validation-samples", train.validation_samples, "Subsets per validation input; 0 = --samples")
      ->capture_default_str();
  train_cmd->add_flag("--paired", train.paired, "Paired (S, N \\ S) sampling");
  train_cmd->add_option("--optimizer", train.optimizer, "adamw or sgd")->capture_default_str();
  train_cmd->add_option("--weight-decay", train.weight_decay, "Decoupled weight decay")->capture_default_str();
  train_cmd->add_option("--validation-fraction", train.validation_fraction, "Held-out fraction")->capture_default_str();
  train_cmd->add_option("--patience", train.patience, "Early-stopping patience in epochs; 0 disables")
      ->capture_default_str();
  train_cmd->add_flag("--all-classes", train.all_classes, "Supervise every class per item");
  train_cmd->add_option("--cosine", train.cosine, "Cosine learning-rate decay")->capture_default_str();
  train_cmd->add_option("--normalize", train.normalize, "FastSHAP additive efficient normalization")
      ->capture_default_str();
  train_cmd->add_option("--averaging", train.averaging, "Parameter EMA decay; 0 disables")->capture_default_str();
  train_cmd->add_option("--metric", train.metric, "SimSHAP metric: identity or shapley_lsv")->capture_default_str();
  train_cmd->add_option("--hidden", train.hidden, "Explainer hidden widths; default by input size")->delimiter(',');
  train_cmd->add_option("--activation", train.activation, "relu or elu")->capture_default_str();

  EvalOptions eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Accuracy, faithfulness, convergence and timing reports");
  add_common(eval_cmd, eval.common);
  add_game_options(eval_cmd, eval.game);
  eval_cmd->add_option("--metric", eval.metric, "l1l2, insertion, deletion, convergence or bench")
      ->capture_default_str();
  eval_cmd->add_option("--estimate", eval.estimate, "Attribution JSON to score (l1l2)");
  eval_cmd->add_option("--truth", eval.truth, "Ground-truth attribution JSON (l1l2)");
  eval_cmd->add_option("--attribution", eval.attribution, "Attribution JSON (insertion/deletion); default exact");
  eval_cmd->add_option("--method", eval.method, "Estimator id (convergence)")->capture_default_str();
  eval_cmd->add_flag("--paired", eval.paired, "Paired sampling (convergence)");
  eval_cmd->add_option("--grid", eval.grid, "Sample budgets (convergence)")->delimiter(',')->capture_default_str();
  eval_cmd->add_option("--seeds", eval.seeds, "Seeds per budget (convergence)")->capture_default_str();
  add_bench_options(eval_cmd, eval.bench, false);

  BenchOptions bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Amortized inference versus KernelSHAP wall time");
  add_common(bench_cmd, bench.common);
  add_bench_options(bench_cmd, bench, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (exact_cmd->parsed()) return cmd_exact(*exact_cmd, exact, out);
    if (estimate_cmd->parsed()) return cmd_estimate(*estimate_cmd, estimate, out);
    if (train_cmd->parsed()) return cmd_train(*train_cmd, train, out);
    if (eval_cmd->parsed()) return cmd_eval(*eval_cmd, eval, out);
    if (bench_cmd->parsed()) return cmd_bench(*bench_cmd, bench, out);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  err << "error: no command given\n";
  return kExitUsage;
}

}  // namespace shapx::cli

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

#include "shapx/io.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace shapx {

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw DataError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

Json attribution_json(const Attribution& a, double v_empty, double v_full, std::optional<double> elapsed_ms) {
  Json j;
  j["phi"] = to_std(a.phi);
  j["method"] = std::string(to_string(a.method));
  j["d"] = a.d();
  j["v_empty"] = v_empty;
  j["v_full"] = v_full;
  j["seed"] = a.seed;
  j["samples_used"] = a.samples_used;
  if (elapsed_ms) j["elapsed_ms"] = *elapsed_ms;
  return j;
}

Attribution attribution_from_json(const Json& j) {
  Attribution a;
  a.phi = to_vector(field<std::vector<double>>(j, "phi"));
  if (j.contains("method")) a.method = method_from_string(field<std::string>(j, "method"));
  if (j.contains("seed")) a.seed = field<std::uint64_t>(j, "seed");
  if (j.contains("samples_used")) a.samples_used = field<std::int64_t>(j, "samples_used");
  if (j.contains("d") && field<int>(j, "d") != a.d()) throw DataError("attribution: 'd' disagrees with phi length");
  return a;
}

Json distance_json(const DistanceReport& r) {
  Json j;
  j["l1"] = r.l1;
  j["l2"] = r.l2;
  j["l1_per_instance"] = r.l1_per_instance;
  j["l2_per_instance"] = r.l2_per_instance;
  return j;
}

Json curve_json(const CurveReport& c) {
  Json j;
  j["mode"] = std::string(to_string(c.mode));
  j["fractions"] = c.fractions;
  j["scores"] = c.scores;
  j["raw_scores"] = c.raw_scores;
  j["auc"] = c.auc;
  j["normalized"] = c.normalized;
  return j;
}

Json convergence_json(const std::vector<ConvergenceRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json j;
    j["samples"] = r.samples;
    j["mean_l1"] = r.mean_l1;
    j["std_l1"] = r.std_l1;
    j["mean_l2"] = r.mean_l2;
    j["std_l2"] = r.std_l2;
    j["l2_per_seed"] = r.l2_per_seed;
    arr.push_back(std::move(j));
  }
  return arr;
}

Json timing_json(const std::vector<TimingRow>& rows, const EnvironmentFingerprint& env) {
  Json j;
  Json methods = Json::array();
  for (const auto& r : rows) {
    Json m;
    m["name"] = r.name;
    m["median_ms"] = r.median_ms;
    m["p95_ms"] = r.p95_ms;
    m["runs"] = r.runs;
    m["samples_ms"] = r.samples_ms;
    methods.push_back(std::move(m));
  }
  j["methods"] = std::move(methods);
  j["environment"] = {{"cpu", env.cpu}, {"hardware_threads", env.hardware_threads}, {"workers", env.workers}};
  return j;
}

Json train_config_json(const TrainConfig& cfg) {
  Json j;
  j["learning_rate"] = cfg.learning_rate;
  j["batch_size"] = cfg.batch_size;
  j["epochs"] = cfg.epochs;
  j["samples"] = cfg.samples;
  j["validation_samples"] = cfg.validation_samples;
  j["paired"] = cfg.paired;
  j["optimizer"] = std::string(to_string(cfg.optimizer));
  j["weight_decay"] = cfg.weight_decay;
  j["seed"] = cfg.seed;
  j["validation_fraction"] = cfg.validation_fraction;
  j["patience"] = cfg.patience;
  j["all_classes"] = cfg.all_classes;
  j["cosine_schedule"] = cfg.cosine_schedule;
  j["averaging"] = cfg.averaging;
  j["normalize"] = cfg.normalize;
  j["metric"] = std::string(to_string(cfg.metric.kind));
  if (cfg.metric.kind == MetricKind::explicit_matrix) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < cfg.metric.entries.rows(); ++r) rows.push_back(to_std(cfg.metric.entries.row(r).transpose()));
    j["metric_entries"] = std::move(rows);
  }
  j["workers"] = cfg.workers;
  return j;
}

TrainConfig train_config_from_json(const Json& j) {
  TrainConfig cfg;
  cfg.learning_rate = field<double>(j, "learning_rate");
  cfg.batch_size = field<int>(j, "batch_size");
  cfg.epochs = field<int>(j, "epochs");
  cfg.samples = field<std::int64_t>(j, "samples");
  cfg.validation_samples = j.value("validation_samples", std::int64_t{0});
  cfg.paired = field<bool>(j, "paired");
  cfg.optimizer = optimizer_from_string(field<std::string>(j, "optimizer"));
  cfg.weight_decay = field<double>(j, "weight_decay");
  cfg.seed = field<std::uint64_t>(j, "seed");
  cfg.validation_fraction = field<double>(j, "validation_fraction");
  cfg.patience = field<int>(j, "patience");
  cfg.all_classes = field<bool>(j, "all_classes");
  cfg.cosine_schedule = field<bool>(j, "cosine_schedule");
  cfg.averaging = j.value("averaging", 0.0);
  cfg.normalize = field<bool>(j, "normalize");
  const MetricKind kind = metric_kind_from_string(field<std::string>(j, "metric"));
  if (kind == MetricKind::explicit_matrix) {
    const auto rows = field<std::vector<std::vector<double>>>(j, "metric_entries");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows.size()) throw DataError("metric_entries must be square");
      m.row(static_cast<Eigen::Index>(r)) = to_vector(rows[r]).transpose();
    }
    cfg.metric = MetricMatrix::explicit_matrix(std::move(m));
  } else {
    cfg.metric.kind = kind;
  }
  cfg.workers = field<int>(j, "workers");
  return cfg;
}

// ---------------------------------------------------------------------------

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) throw DataError("failed writing '" + path + "'");
}

Json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

namespace {

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

}  // namespace

void write_curve_csv(const std::string& path, const CurveReport& c) {
  auto out = open_csv(path);
  out << "fraction,score\n";
  for (std::size_t k = 0; k < c.fractions.size(); ++k) {
    out << format_double(c.fractions[k]) << ',' << format_double(c.scores[k]) << '\n';
  }
}

void write_loss_csv(const std::string& path, const std::vector<LossRecord>& h) {
  auto out = open_csv(path);
  out << "epoch,train_loss,validation_loss\n";
  for (const auto& r : h) out << r.epoch << ',' << format_double(r.train) << ',' << format_double(r.validation) << '\n';
}

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows) {
  auto out = open_csv(path);
  out << "samples,mean_l1,std_l1,mean_l2,std_l2\n";
  for (const auto& r : rows) {
    out << r.samples << ',' << format_double(r.mean_l1) << ',' << format_double(r.std_l1) << ','
        << format_double(r.mean_l2) << ',' << format_double(r.std_l2) << '\n';
  }
}

void write_distance_csv(const std::string& path, const DistanceReport& r) {
  auto out = open_csv(path);
  out << "instance,l1,l2\n";
  for (std::size_t k = 0; k < r.l1_per_instance.size(); ++k) {
    out << k << ',' << format_double(r.l1_per_instance[k]) << ',' << format_double(r.l2_per_instance[k]) << '\n';
  }
}

// ---------------------------------------------------------------------------

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

}  // namespace

std::string base64_encode(const std::vector<unsigned char>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  for (std::size_t i = 0; i < bytes.size(); i += 3) {
    std::uint32_t chunk = static_cast<std::uint32_t>(bytes[i]) << 16;
    if (i + 1 < bytes.size()) chunk |= static_cast<std::uint32_t>(bytes[i + 1]) << 8;
    if (i + 2 < bytes.size()) chunk |= bytes[i + 2];
    out.push_back(kAlphabet[(chunk >> 18) & 63]);
    out.push_back(kAlphabet[(chunk >> 12) & 63]);
    out.push_back(i + 1 < bytes.size() ? kAlphabet[(chunk >> 6) & 63] : '=');
    out.push_back(i + 2 < bytes.size() ? kAlphabet[chunk & 63] : '=');
  }
  return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
  if (text.size() % 4 != 0) throw DataError("base64: length is not a multiple of 4");
  std::vector<unsigned char> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::uint32_t chunk = 0;
    int pad = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const char c = text[i + k];
      int v = 0;
      if (c == '=' && i + 4 == text.size() && k >= 2) {
        ++pad;
      } else {
        if (pad > 0 || (v = decode_char(c)) < 0) throw DataError("base64: invalid character");
      }
      chunk = (chunk << 6) | static_cast<std::uint32_t>(v);
    }
    out.push_back(static_cast<unsigned char>(chunk >> 16));
    if (pad < 2) out.push_back(static_cast<unsigned char>(chunk >> 8));
    if (pad < 1) out.push_back(static_cast<unsigned char>(chunk));
  }
  return out;
}

Json encode_doubles(const Vector& values) {
  std::vector<unsigned char> bytes;
  bytes.reserve(static_cast<std::size_t>(values.size()) * 8);
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &values[k], sizeof bits);
    for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<unsigned char>(bits >> (8 * b)));
  }
  Json j;
  j["encoding"] = "base64-f64le";
  j["count"] = values.size();
  j["data"] = base64_encode(bytes);
  return j;
}

Vector decode_doubles(const Json& j) {
  if (field<std::string>(j, "encoding") != "base64-f64le") throw DataError("unsupported parameter encoding");
  const auto count = field<std::size_t>(j, "count");
  const auto bytes = base64_decode(field<std::string>(j, "data"));
  if (bytes.size() != count * 8) throw DataError("parameter payload length disagrees with count");
  Vector out(static_cast<Eigen::Index>(count));
  for (std::size_t k = 0; k < count; ++k) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[k * 8 + static_cast<std::size_t>(b)]) << (8 * b);
    std::memcpy(&out[static_cast<Eigen::Index>(k)], &bits, sizeof bits);
  }
  return out;
}

namespace {

Json container(const char* type) {
  Json j;
  j["format"] = "shapx-checkpoint";
  j["version"] = kCheckpointVersion;
  j["type"] = type;
  return j;
}

void check_container(const Json& j, const std::string& type, const std::string& path) {
  if (!j.is_object() || j.value("format", "") != "shapx-checkpoint") {
    throw DataError("'" + path + "' is not a shapx checkpoint");
  }
  if (j.value("version", 0) != kCheckpointVersion) {
    throw DataError("'" + path + "' has unsupported checkpoint version " + j.at("version").dump());
  }
  if (j.value("type", "") != type) {
    throw DataError("'" + path + "' holds a '" + j.value("type", "") + "', expected '" + type + "'");
  }
}

Json mlp_json(const Mlp<double>& net) {
  Json j;
  j["widths"] = net.widths();
  j["activation"] = std::string(to_string(net.activation()));
  j["parameters"] = encode_doubles(net.parameters());
  return j;
}

Mlp<double> mlp_from_json(const Json& j) {
  Mlp<double> net(field<std::vector<int>>(j, "widths"), activation_from_string(field<std::string>(j, "activation")));
  net.set_parameters(decode_doubles(j.at("parameters")));
  return net;
}

}  // namespace

void save_explainer(const std::string& path, const ExplainerNet& net, const Json& config) {
  Json j = container("explainer");
  j["kind"] = std::string(to_string(net.kind));
  j["players"] = net.players;
  j["classes"] = net.classes;
  j["network"] = mlp_json(net.mlp);
  j["config"] = config;
  j["seed"] = config.is_object() && config.contains("seed") ? config["seed"] : Json(nullptr);
  write_json(path, j);
}

ExplainerCheckpoint load_explainer(const std::string& path) {
  const Json j = read_json(path);
  check_container(j, "explainer", path);
  try {
    ExplainerCheckpoint ck;
    ck.net.kind = explainer_kind_from_string(field<std::string>(j, "kind"));
    ck.net.players = field<int>(j, "players");
    ck.net.classes = field<int>(j, "classes");
    ck.net.mlp = mlp_from_json(j.at("network"));
    if (ck.net.mlp.output_width() != ck.net.players * ck.net.classes) {
      throw DataError("output width disagrees with players x classes");
    }
    ck.config = j.value("config", Json(nullptr));
    return ck;
  } catch (const ArgumentError& e) {
    throw DataError("'" + path + "': " + e.what());
  }
}

void save_model(const std::string& path, const TabularModel& model) {
  Json j = container("tabular_model");
  j["kind"] = std::string(to_string(model.kind()));
  j["input_width"] = model.input_width();
  j["classes"] = model.classes();
  if (model.kind() == ModelKind::mlp) {
    j["network"] = mlp_json(model.network());
  } else {
    const Matrix& w = model.weights();
    j["weights"] = encode_doubles(Eigen::Map<const Vector>(w.data(), w.size()));
    j["bias"] = encode_doubles(model.bias());
  }
  Json meta = Json::object();
  for (const auto& [k, v] : model.metadata()) meta[k] = v;
  j["metadata"] = std::move(meta);
  write_json(path, j);
}

TabularModel load_model(const std::string& path) {
  const Json j = read_json(path);
  check_container(j, "tabular_model", path);
  try {
    const ModelKind kind = model_kind_from_string(field<std::string>(j, "kind"));
    const int width = field<int>(j, "input_width");
    const int classes = field<int>(j, "classes");
    TabularModel model;
    if (kind == ModelKind::mlp) {
      model = TabularModel::mlp(mlp_from_json(j.at("network")));
    } else {
      const Vector flat = decode_doubles(j.at("weights"));
      if (flat.size() != static_cast<Eigen::Index>(width) * classes) throw DataError("weight count disagrees with shape");
      Matrix w = Eigen::Map<const Matrix>(flat.data(), classes, width);
      Vector b = decode_doubles(j.at("bias"));
      model = kind == ModelKind::linear ? TabularModel::linear(std::move(w), std::move(b))
                                        : TabularModel::logistic(std::move(w), std::move(b));
    }
    if (model.input_width() != width || model.classes() != classes) throw DataError("model shape disagrees with header");
    if (j.contains("metadata")) {
      for (const auto& [k, v] : j.at("metadata").items()) model.metadata()[k] = v.get<std::string>();
    }
    return model;
  } catch (const ArgumentError& e) {
    throw DataError("'" + path + "': " + e.what());
  }
}

}  // namespace shapx

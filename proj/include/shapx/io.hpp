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

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "shapx/amortized.hpp"
#include "shapx/core.hpp"
#include "shapx/eval.hpp"
#include "shapx/models.hpp"

namespace shapx {

using Json = nlohmann::ordered_json;

inline constexpr int kCheckpointVersion = 1;

/// {phi, method, d, v_empty, v_full, seed, samples_used[, elapsed_ms]}.
Json attribution_json(const Attribution& a, double v_empty, double v_full, std::optional<double> elapsed_ms);
Attribution attribution_from_json(const Json& j);

Json distance_json(const DistanceReport& r);
Json curve_json(const CurveReport& c);
Json convergence_json(const std::vector<ConvergenceRow>& rows);
Json timing_json(const std::vector<TimingRow>& rows, const EnvironmentFingerprint& env);
Json train_config_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const Json& j);

/// Pretty-printed with a trailing newline. Failures raise DataError naming the path.
void write_json(const std::string& path, const Json& j);
Json read_json(const std::string& path);

/// CSV writers; numbers use 17 significant digits.
void write_curve_csv(const std::string& path, const CurveReport& c);          // fraction,score
void write_loss_csv(const std::string& path, const std::vector<LossRecord>& h);  // epoch,train_loss,validation_loss
void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows);
void write_distance_csv(const std::string& path, const DistanceReport& r);
std::string format_double(double v);

std::string base64_encode(const std::vector<unsigned char>& bytes);
std::vector<unsigned char> base64_decode(const std::string& text);

/// Raw little-endian IEEE-754 doubles, base64 encoded: {"encoding", "count", "data"}.
Json encode_doubles(const Vector& values);
Vector decode_doubles(const Json& j);

struct ExplainerCheckpoint {
  ExplainerNet net;
  Json config;  // training configuration recorded at save time (may be null)
};

void save_explainer(const std::string& path, const ExplainerNet& net, const Json& config);
ExplainerCheckpoint load_explainer(const std::string& path);

void save_model(const std::string& path, const TabularModel& model);
TabularModel load_model(const std::string& path);

}  // namespace shapx

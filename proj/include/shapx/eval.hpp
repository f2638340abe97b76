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
#include <string>
#include <vector>

#include "shapx/core.hpp"
#include "shapx/models.hpp"
#include "shapx/stochastic.hpp"

namespace shapx {

struct DistanceReport {
  double l1 = 0.0;  // mean over instances
  double l2 = 0.0;
  std::vector<double> l1_per_instance;
  std::vector<double> l2_per_instance;
};

/// l1 = sum |est - truth|, l2 = ||est - truth||_2.
DistanceReport attribution_distance(const Attribution& est, const Attribution& truth);
/// Per-instance distances and their means; inputs are matched by index.
DistanceReport attribution_distance(const std::vector<Attribution>& est, const std::vector<Attribution>& truth);

enum class CurveMode { insertion, deletion };

std::string_view to_string(CurveMode m);
CurveMode curve_mode_from_string(std::string_view s);

/// Score curve over the grid k/d, k = 0..d. When normalized, insertion runs 0 -> 1 and
/// deletion 1 -> 0 under the affine map fixed by the two endpoints.
struct CurveReport {
  CurveMode mode = CurveMode::insertion;
  std::vector<double> fractions;
  std::vector<double> scores;
  std::vector<double> raw_scores;
  double auc = 0.0;
  bool normalized = false;
};

/// Features by descending attribution, ties by ascending index.
std::vector<int> attribution_order(const Vector& attribution);

/// Insertion adds features in `order` to the empty coalition; deletion removes them from N.
CurveReport order_curve(const CoalitionGame& game, const std::vector<int>& order, CurveMode mode);

CurveReport insertion_deletion(const CoalitionGame& game, const Vector& attribution, CurveMode mode);

/// Masks `x` through `rule` and scores class `cls` of `model`.
CurveReport insertion_deletion(const TabularModel& model, const Vector& x, const Vector& attribution, int cls,
                               const MaskingRule& rule, CurveMode mode);

/// Trapezoid rule over (fractions, scores).
double trapezoid_auc(const std::vector<double>& fractions, const std::vector<double>& scores);

struct ConvergenceRow {
  std::int64_t samples = 0;
  double mean_l1 = 0.0;
  double std_l1 = 0.0;
  double mean_l2 = 0.0;
  double std_l2 = 0.0;
  /// l2 error of every seed, in seed order.
  std::vector<double> l2_per_seed;
};

/// Runs `estimator` for each M in `grid` and each of `seeds` streams of `seed`, scoring against
/// exact_shapley. Seeds run on up to `workers` threads; rows are reported in grid order.
std::vector<ConvergenceRow> convergence_probe(const Estimator& estimator, const CoalitionGame& game,
                                              const std::vector<std::int64_t>& grid, int seeds, std::uint64_t seed,
                                              int workers = 1);
/// Same with a precomputed ground truth.
std::vector<ConvergenceRow> convergence_probe(const Estimator& estimator, const CoalitionGame& game,
                                              const Attribution& truth, const std::vector<std::int64_t>& grid,
                                              int seeds, std::uint64_t seed, int workers = 1);

struct TimingRow {
  std::string name;
  double median_ms = 0.0;
  double p95_ms = 0.0;
  int runs = 0;
  std::vector<double> samples_ms;
};

struct EnvironmentFingerprint {
  std::string cpu;
  int hardware_threads = 1;
  int workers = 1;
};

EnvironmentFingerprint environment_fingerprint(int workers);

struct BenchmarkCase {
  std::string name;
  std::function<void()> run;
};

/// Discards `warmup` (>= 3) runs, then times `runs` (>= 10) calls of each case.
std::vector<TimingRow> benchmark_timing(const std::vector<BenchmarkCase>& cases, int warmup = 3, int runs = 10);

/// Median and nearest-rank 95th percentile.
double median(std::vector<double> values);
double percentile(std::vector<double> values, double q);

}  // namespace shapx

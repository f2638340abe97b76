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

#include "shapx/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include "shapx/exact.hpp"
#include "shapx/parallel.hpp"

namespace shapx {

DistanceReport attribution_distance(const Attribution& est, const Attribution& truth) {
  return attribution_distance(std::vector<Attribution>{est}, std::vector<Attribution>{truth});
}

DistanceReport attribution_distance(const std::vector<Attribution>& est, const std::vector<Attribution>& truth) {
  if (est.size() != truth.size()) throw ArgumentError("attribution_distance: instance counts differ");
  DistanceReport report;
  for (std::size_t k = 0; k < est.size(); ++k) {
    if (est[k].phi.size() != truth[k].phi.size()) {
      throw ArgumentError("attribution_distance: dimension mismatch (" + std::to_string(est[k].phi.size()) + " vs " +
                          std::to_string(truth[k].phi.size()) + ")");
    }
    const Vector delta = est[k].phi - truth[k].phi;
    report.l1_per_instance.push_back(delta.lpNorm<1>());
    report.l2_per_instance.push_back(delta.norm());
  }
  if (!est.empty()) {
    const auto n = static_cast<double>(est.size());
    report.l1 = std::accumulate(report.l1_per_instance.begin(), report.l1_per_instance.end(), 0.0) / n;
    report.l2 = std::accumulate(report.l2_per_instance.begin(), report.l2_per_instance.end(), 0.0) / n;
  }
  return report;
}

// ---------------------------------------------------------------------------

std::string_view to_string(CurveMode m) { return m == CurveMode::insertion ? "insertion" : "deletion"; }

CurveMode curve_mode_from_string(std::string_view s) {
  if (s == "insertion") return CurveMode::insertion;
  if (s == "deletion") return CurveMode::deletion;
  throw ArgumentError("unknown curve mode '" + std::string(s) + "'");
}

std::vector<int> attribution_order(const Vector& attribution) {
  std::vector<int> order(static_cast<std::size_t>(attribution.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return attribution[a] > attribution[b]; });
  return order;
}

double trapezoid_auc(const std::vector<double>& fractions, const std::vector<double>& scores) {
  if (fractions.size() != scores.size()) throw ArgumentError("trapezoid_auc: length mismatch");
  double area = 0.0;
  for (std::size_t k = 1; k < fractions.size(); ++k) {
    area += 0.5 * (fractions[k] - fractions[k - 1]) * (scores[k] + scores[k - 1]);
  }
  return area;
}

CurveReport order_curve(const CoalitionGame& game, const std::vector<int>& order, CurveMode mode) {
  const int d = game.d();
  if (static_cast<int>(order.size()) != d) throw ArgumentError("order_curve: order length must equal d");
  (void)Permutation(order);  // validates the bijection

  CurveReport curve;
  curve.mode = mode;
  FeatureSubset s = mode == CurveMode::insertion ? FeatureSubset::empty(d) : FeatureSubset::full(d);
  for (int k = 0; k <= d; ++k) {
    curve.fractions.push_back(static_cast<double>(k) / d);
    if (k == 0) {
      curve.raw_scores.push_back(mode == CurveMode::insertion ? game.v_empty() : game.v_full());
    } else if (k == d) {
      curve.raw_scores.push_back(mode == CurveMode::insertion ? game.v_full() : game.v_empty());
    } else {
      curve.raw_scores.push_back(game(s));
    }
    if (k < d) {
      const int i = order[static_cast<std::size_t>(k)];
      s = mode == CurveMode::insertion ? s.with(i) : s.without(i);
    }
  }

  const double first = curve.raw_scores.front();
  const double last = curve.raw_scores.back();
  curve.scores = curve.raw_scores;
  if (first != last) {
    // insertion: first -> 0, last -> 1; deletion: first -> 1, last -> 0.
    const double lo = mode == CurveMode::insertion ? first : last;
    const double hi = mode == CurveMode::insertion ? last : first;
    for (double& v : curve.scores) v = (v - lo) / (hi - lo) + 0.0;  // + 0.0 turns -0 into 0
    curve.normalized = true;
  }
  curve.auc = trapezoid_auc(curve.fractions, curve.scores);
  return curve;
}

CurveReport insertion_deletion(const CoalitionGame& game, const Vector& attribution, CurveMode mode) {
  if (attribution.size() != game.d()) throw ArgumentError("insertion_deletion: attribution length must equal d");
  return order_curve(game, attribution_order(attribution), mode);
}

CurveReport insertion_deletion(const TabularModel& model, const Vector& x, const Vector& attribution, int cls,
                               const MaskingRule& rule, CurveMode mode) {
  return insertion_deletion(masked_game(model, x, cls, rule), attribution, mode);
}

// ---------------------------------------------------------------------------

namespace {

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0};
}

}  // namespace

std::vector<ConvergenceRow> convergence_probe(const Estimator& estimator, const CoalitionGame& game,
                                              const std::vector<std::int64_t>& grid, int seeds, std::uint64_t seed,
                                              int workers) {
  return convergence_probe(estimator, game, exact_shapley(game), grid, seeds, seed, workers);
}

std::vector<ConvergenceRow> convergence_probe(const Estimator& estimator, const CoalitionGame& game,
                                              const Attribution& truth, const std::vector<std::int64_t>& grid,
                                              int seeds, std::uint64_t seed, int workers) {
  if (seeds < 1) throw ArgumentError("convergence_probe: seeds must be >= 1");
  std::vector<ConvergenceRow> rows;
  for (std::int64_t M : grid) {
    std::vector<double> l1(static_cast<std::size_t>(seeds));
    std::vector<double> l2(static_cast<std::size_t>(seeds));
    parallel_for(static_cast<std::size_t>(seeds), workers, [&](std::size_t k) {
      RandomSource rng(seed, static_cast<std::uint64_t>(k));
      const DistanceReport dist = attribution_distance(estimator(game, M, rng), truth);
      l1[k] = dist.l1;
      l2[k] = dist.l2;
    });
    ConvergenceRow row;
    row.samples = M;
    std::tie(row.mean_l1, row.std_l1) = mean_std(l1);
    std::tie(row.mean_l2, row.std_l2) = mean_std(l2);
    row.l2_per_seed = l2;
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw ArgumentError("percentile: no values");
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

double median(std::vector<double> values) {
  if (values.empty()) throw ArgumentError("median: no values");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

EnvironmentFingerprint environment_fingerprint(int workers) {
  EnvironmentFingerprint fp;
  fp.hardware_threads = default_workers();
  fp.workers = workers;
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) fp.cpu = line.substr(line.find_first_not_of(' ', colon + 1));
      break;
    }
  }
  if (fp.cpu.empty()) fp.cpu = "unknown";
  return fp;
}

std::vector<TimingRow> benchmark_timing(const std::vector<BenchmarkCase>& cases, int warmup, int runs) {
  if (warmup < 3) throw ArgumentError("benchmark_timing: at least 3 warmup runs");
  if (runs < 10) throw ArgumentError("benchmark_timing: at least 10 timed runs");
  // Runs are interleaved across cases so slow periods on the host hit every case alike.
  for (const auto& c : cases) {
    for (int w = 0; w < warmup; ++w) c.run();
  }
  std::vector<TimingRow> rows(cases.size());
  for (std::size_t k = 0; k < cases.size(); ++k) {
    rows[k].name = cases[k].name;
    rows[k].runs = runs;
  }
  for (int r = 0; r < runs; ++r) {
    for (std::size_t k = 0; k < cases.size(); ++k) {
      const auto t0 = std::chrono::steady_clock::now();
      cases[k].run();
      const auto t1 = std::chrono::steady_clock::now();
      rows[k].samples_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
  }
  for (auto& row : rows) {
    row.median_ms = median(row.samples_ms);
    row.p95_ms = percentile(row.samples_ms, 0.95);
  }
  return rows;
}

}  // namespace shapx

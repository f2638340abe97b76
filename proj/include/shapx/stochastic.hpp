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
#include <unordered_map>
#include <vector>

#include "shapx/core.hpp"
#include "shapx/unified.hpp"

namespace shapx {

/// Memoizes v(S) by subset bits so a repeated subset costs one game evaluation.
class ValueCache {
 public:
  explicit ValueCache(const CoalitionGame& game);

  double operator()(const FeatureSubset& s);
  const CoalitionGame& game() const { return game_; }
  std::size_t evaluations() const { return evaluations_; }

 private:
  const CoalitionGame& game_;
  std::unordered_map<std::uint64_t, double> values_;
  std::size_t evaluations_ = 0;
};

struct SampledBatch {
  std::vector<FeatureSubset> subsets;
  std::vector<double> values;
  bool paired = false;  // subsets come as consecutive (S, N \ S) pairs
};

/// Draws sizes from C(d,s) omega(s) / gamma, then a uniform subset of that size.
class KernelSampler {
 public:
  explicit KernelSampler(const KernelWeights& weights);
  FeatureSubset operator()(RandomSource& rng) const;
  int d() const { return d_; }

 private:
  int d_;
  std::vector<double> cumulative_;  // over sizes 0..d
};

struct KernelDraw {
  FeatureSubset subset;
  std::optional<FeatureSubset> complement;
};

KernelDraw sample_kernel_subset(const KernelWeights& weights, RandomSource& rng, bool paired);

/// M subsets from p^ls with their values; paired draws M/2 (S, N \ S) pairs (M even).
SampledBatch sample_kernel_batch(ValueCache& values, const KernelWeights& weights, std::int64_t M, RandomSource& rng,
                                 bool paired);

/// Monte Carlo semivalue estimate for one feature: mean of marginals over S ~ p^sv on N \ {i}.
double estimate_semivalue_mc(const CoalitionGame& game, int feature, std::int64_t M, RandomSource& rng);

/// estimate_semivalue_mc for every feature, feature i drawing from rng.split(i).
Attribution estimate_semivalue(const CoalitionGame& game, std::int64_t M, RandomSource& rng);

/// Mean marginal contributions along M uniform permutations. With `antithetical`, M/2
/// permutations are each paired with their reversal (M must be even).
Attribution estimate_permutation(const CoalitionGame& game, std::int64_t M, RandomSource& rng, bool antithetical);

struct KernelShapOptions {
  bool paired = false;
  /// Solve the efficiency-constrained problem; otherwise solve unconstrained and apply
  /// additive efficient normalization.
  bool constrained = true;
  double ridge = 1e-9;
};

/// Sampled KernelSHAP: empirical A = mean 1^S 1^S^T and b = mean 1^S (v(S) - v({})) over M
/// draws from p^ls, then the KKT solution of min phi^T A phi - 2 phi^T b s.t. 1^T phi = v_all.
Attribution estimate_kernelshap(const CoalitionGame& game, std::int64_t M, RandomSource& rng,
                                const KernelShapOptions& options = {});
Attribution estimate_kernelshap(const CoalitionGame& game, std::int64_t M, RandomSource& rng, bool paired);

/// Minimizer of phi^T A phi - 2 phi^T b subject to 1^T phi = v_all. Rank-deficient A gets
/// `ridge` * I added with a warning; sets *ridged when that happens.
Vector solve_efficiency_constrained(const Matrix& A, const Vector& b, double v_all, double ridge = 1e-9,
                                    bool* ridged = nullptr);

/// Exact E[1^S 1^S^T] under p^ls, computed per size class.
Matrix kernel_indicator_moments(int d);

/// Unbiased KernelSHAP: exact A, Monte Carlo b_M = mean 1^S v(S) - E[1^S] v({}).
Attribution estimate_kernelshap_unbiased(const CoalitionGame& game, std::int64_t M, RandomSource& rng);

/// SimSHAP single-pass target: mean over S ~ p^ls of
///   c (d - |S|) v(S) for i in S,   -c |S| v(S) for i not in S,
/// plus (v(N) - v({}))/d. c = gamma/(d-1). Same code path as the unified SimSHAP row.
Attribution simshap_target(const CoalitionGame& game, std::int64_t M, RandomSource& rng, bool paired);

/// phi = T ((1/M) sum_k a_{S_k} v(S_k)) + b. Configurations whose probability does not depend
/// on i share one draw across coordinates (and support `paired`); otherwise each coordinate
/// draws its own M subsets from rng.split(i).
Attribution estimate_unified(const UnifiedStochasticConfig& config, const CoalitionGame& game, std::int64_t M,
                             RandomSource& rng, bool paired = false);

// ---------------------------------------------------------------------------
// Registry used by the CLI and the evaluation harness.
// ---------------------------------------------------------------------------

using Estimator = std::function<Attribution(const CoalitionGame&, std::int64_t, RandomSource&)>;

/// ids: semivalue, permutation, antithetical, kernelshap, kernelshap-unbiased, simshap-sample,
/// unified:sv, unified:lsv, unified:simshap.
Estimator make_estimator(const std::string& id, bool paired = false);
std::vector<std::string> estimator_ids();

}  // namespace shapx

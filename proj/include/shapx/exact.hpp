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

#include <vector>

#include "shapx/core.hpp"
#include "shapx/unified.hpp"

namespace shapx {

inline constexpr int kMaxExactShapleyPlayers = 20;
inline constexpr int kMaxRandomOrderPlayers = 8;
inline constexpr int kMaxLeastSquaresPlayers = 16;
inline constexpr int kMaxUnifiedExpectationPlayers = 14;

/// A bijection on {0..d-1}; order[k] is the player in position k.
class Permutation {
 public:
  explicit Permutation(std::vector<int> order);
  static Permutation identity(int d);

  const std::vector<int>& order() const { return order_; }
  int d() const { return static_cast<int>(order_.size()); }
  Permutation reversed() const;
  /// H^i(pi): players placed before i.
  FeatureSubset predecessors(int i) const;

 private:
  std::vector<int> order_;
};

/// Brute-force semivalue form: sum over S not containing i of |S|!(d-|S|-1)!/d! marginals.
Attribution exact_shapley(const CoalitionGame& game);

/// Average of marginal contributions over all d! orderings.
Attribution exact_random_order(const CoalitionGame& game);

/// Closed-form KKT solution of the constrained weighted least squares problem,
///   phi = (d I - J)/(d - 1) U^T W v + (v(N) - v({}))/d 1,
/// with U^T W v accumulated by enumeration of the proper non-empty subsets.
Attribution exact_least_squares(const CoalitionGame& game);

/// T (sum_S p^i(S) a^i_S v(S))_i + b by enumeration over the configuration's domain.
Attribution exact_unified_expectation(const UnifiedStochasticConfig& config, const CoalitionGame& game);

/// U^T W v over proper non-empty subsets.
Vector weighted_indicator_sum(const CoalitionGame& game);

/// U^T W U accumulated subset by subset.
Matrix shapley_gram_by_enumeration(int d);

/// U^T W U = ((d-1)/d) I + B J with B = A - (d-1)/d and A = ((d-1)/d) sum_{k=1}^{d-1} 1/k.
Matrix shapley_gram_closed_form(int d);

/// The coefficient B of the closed form above.
double shapley_gram_offdiagonal(int d);

/// (U^T W U)^{-1} U^T W v_Delta: the unconstrained weighted least squares solution.
Vector unconstrained_least_squares(const CoalitionGame& game);

}  // namespace shapx

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

#include <functional>
#include <string>

#include "shapx/core.hpp"

namespace shapx {

enum class SubsetDomain { all_subsets, proper_nonempty };

enum class TransformKind {
  identity,
  centering,  // scale * (d I - J)
  custom,
};

enum class BiasKind { zero, efficiency };

/// The quadruple (p^i(S), a^i_S, T, b) of a unified stochastic estimator
///
///   phi = T * phi_tilde + b,   phi_tilde_i = E_{S ~ p^i} [ a^i_S v(S) ].
///
/// Probability and coefficient depend on S only through (|S|, i in S), which covers every
/// estimator in the family. `prob` is a proper distribution over the domain for each i.
struct UnifiedStochasticConfig {
  using SizeFn = std::function<double(int size, bool contains)>;

  std::string name;
  int d = 0;
  SubsetDomain domain = SubsetDomain::proper_nonempty;
  SizeFn prob;
  SizeFn coeff;
  TransformKind transform = TransformKind::identity;
  double transform_scale = 1.0;
  Matrix custom_transform;
  BiasKind bias = BiasKind::zero;

  /// Semivalue row. The literal row has mass 2 over P(N) (one on subsets containing i, one on
  /// the rest); this uses p/2 with coefficient 2(2 1[i in S] - 1) so the product is unchanged.
  static UnifiedStochasticConfig semivalue_row(int d);
  /// Least squares value row: p^ls, a = 1[i in S], T = c (d I - J), b = v_all/d 1.
  static UnifiedStochasticConfig least_squares_row(int d);
  /// SimSHAP row: p^ls, a = c((d-|S|) 1[i in S] - |S| 1[i notin S]), T = I, b = v_all/d 1.
  static UnifiedStochasticConfig simshap_row(int d);
  static UnifiedStochasticConfig by_name(const std::string& row, int d);

  Matrix transform_matrix() const;
  Vector bias_vector(double v_all) const;

  /// True when p^i(S) does not depend on i, so one draw serves every coordinate.
  bool shared_sampling() const;

  /// Probability mass of the class {S in domain : |S| = s, (i in S) == contains} for a fixed i.
  double class_mass(int s, bool contains) const;
  bool in_domain(int s) const;

  /// Throws ConfigError when d is out of range, the transform has the wrong shape, or the
  /// probabilities do not sum to one on the domain.
  void validate() const;
  void validate_for(const CoalitionGame& game) const;
};

}  // namespace shapx

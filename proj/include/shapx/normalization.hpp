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

#include <Eigen/Core>

namespace shapx {

/// Additive efficient normalization: (d I - J)/d phi + v_all/d 1. The result sums to v_all
/// and the map is idempotent.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> additive_efficient_normalization(
    const Eigen::MatrixBase<Derived>& phi_raw, typename Derived::Scalar v_all) {
  using Scalar = typename Derived::Scalar;
  const auto d = static_cast<Scalar>(phi_raw.size());
  return phi_raw.array() - phi_raw.mean() + v_all / d;
}

}  // namespace shapx

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

#include "shapx/unified.hpp"

#include <cmath>

namespace shapx {

namespace {

double count_in_class(int d, int s, bool contains) {
  if (contains) return s >= 1 ? static_cast<double>(binomial(d - 1, s - 1)) : 0.0;
  return s <= d - 1 ? static_cast<double>(binomial(d - 1, s)) : 0.0;
}

}  // namespace

UnifiedStochasticConfig UnifiedStochasticConfig::semivalue_row(int d) {
  if (d < 1) throw ConfigError("semivalue_row: d must be >= 1");
  UnifiedStochasticConfig cfg;
  cfg.name = "sv";
  cfg.d = d;
  cfg.domain = SubsetDomain::all_subsets;
  cfg.prob = [d](int s, bool contains) {
    const double c = static_cast<double>(binomial(d, s));
    const double k = contains ? s : d - s;
    return k > 0 ? 0.5 / (c * k) : 0.0;
  };
  cfg.coeff = [](int, bool contains) { return contains ? 2.0 : -2.0; };
  cfg.transform = TransformKind::identity;
  cfg.bias = BiasKind::zero;
  return cfg;
}

UnifiedStochasticConfig UnifiedStochasticConfig::least_squares_row(int d) {
  if (d < 2) throw ConfigError("least_squares_row: d must be >= 2");
  const KernelWeights kw = kernel_normalizer(d);
  UnifiedStochasticConfig cfg;
  cfg.name = "lsv";
  cfg.d = d;
  cfg.domain = SubsetDomain::proper_nonempty;
  cfg.prob = [kw](int s, bool) { return kw.subset_probability(s); };
  cfg.coeff = [](int, bool contains) { return contains ? 1.0 : 0.0; };
  cfg.transform = TransformKind::centering;
  cfg.transform_scale = kw.coefficient_scale();
  cfg.bias = BiasKind::efficiency;
  return cfg;
}

UnifiedStochasticConfig UnifiedStochasticConfig::simshap_row(int d) {
  if (d < 2) throw ConfigError("simshap_row: d must be >= 2");
  const KernelWeights kw = kernel_normalizer(d);
  const double scale = kw.coefficient_scale();
  UnifiedStochasticConfig cfg;
  cfg.name = "simshap";
  cfg.d = d;
  cfg.domain = SubsetDomain::proper_nonempty;
  cfg.prob = [kw](int s, bool) { return kw.subset_probability(s); };
  cfg.coeff = [d, scale](int s, bool contains) { return contains ? scale * (d - s) : -scale * s; };
  cfg.transform = TransformKind::identity;
  cfg.bias = BiasKind::efficiency;
  return cfg;
}

UnifiedStochasticConfig UnifiedStochasticConfig::by_name(const std::string& row, int d) {
  if (row == "sv" || row == "semivalue") return semivalue_row(d);
  if (row == "lsv" || row == "least_squares") return least_squares_row(d);
  if (row == "simshap" || row == "ours") return simshap_row(d);
  throw ConfigError("unknown unified row '" + row + "' (expected sv, lsv or simshap)");
}

Matrix UnifiedStochasticConfig::transform_matrix() const {
  switch (transform) {
    case TransformKind::identity:
      return Matrix::Identity(d, d);
    case TransformKind::centering:
      return transform_scale * (static_cast<double>(d) * Matrix::Identity(d, d) - Matrix::Ones(d, d));
    case TransformKind::custom:
      return custom_transform;
  }
  return Matrix::Identity(d, d);
}

Vector UnifiedStochasticConfig::bias_vector(double v_all) const {
  if (bias == BiasKind::zero) return Vector::Zero(d);
  return Vector::Constant(d, v_all / static_cast<double>(d));
}

bool UnifiedStochasticConfig::in_domain(int s) const {
  if (domain == SubsetDomain::all_subsets) return s >= 0 && s <= d;
  return s >= 1 && s <= d - 1;
}

double UnifiedStochasticConfig::class_mass(int s, bool contains) const {
  if (!in_domain(s)) return 0.0;
  const double n = count_in_class(d, s, contains);
  return n > 0.0 ? n * prob(s, contains) : 0.0;
}

bool UnifiedStochasticConfig::shared_sampling() const {
  for (int s = 0; s <= d; ++s) {
    if (!in_domain(s)) continue;
    const bool has_in = count_in_class(d, s, true) > 0.0;
    const bool has_out = count_in_class(d, s, false) > 0.0;
    if (has_in && has_out && prob(s, true) != prob(s, false)) return false;
  }
  return true;
}

void UnifiedStochasticConfig::validate() const {
  if (d < 1 || d > kMaxPlayers) throw ConfigError("unified config '" + name + "': d out of range");
  if (domain == SubsetDomain::proper_nonempty && d < 2) {
    throw ConfigError("unified config '" + name + "': proper non-empty domain needs d >= 2");
  }
  if (!prob || !coeff) throw ConfigError("unified config '" + name + "': missing prob/coeff");
  if (transform == TransformKind::custom && (custom_transform.rows() != d || custom_transform.cols() != d)) {
    throw ConfigError("unified config '" + name + "': custom transform is not d x d");
  }
  double total = 0.0;
  for (int s = 0; s <= d; ++s) {
    for (bool contains : {false, true}) {
      const double m = class_mass(s, contains);
      if (m < 0.0 || !std::isfinite(m)) throw ConfigError("unified config '" + name + "': invalid probability");
      total += m;
    }
  }
  if (std::abs(total - 1.0) > 1e-10) {
    throw ConfigError("unified config '" + name + "': probabilities sum to " + std::to_string(total));
  }
}

void UnifiedStochasticConfig::validate_for(const CoalitionGame& game) const {
  validate();
  if (game.d() != d) {
    throw ConfigError("unified config '" + name + "' built for d=" + std::to_string(d) + " applied to game with d=" +
                      std::to_string(game.d()));
  }
}

}  // namespace shapx

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

#include "shapx/stochastic.hpp"

#include <cmath>

#include "shapx/normalization.hpp"

namespace shapx {

namespace {

void require_samples(std::int64_t M, const char* what) {
  if (M < 1) throw ArgumentError(std::string(what) + ": sample count must be >= 1, got " + std::to_string(M));
}

void require_even_if_paired(std::int64_t M, bool paired, const char* what) {
  if (paired && M % 2 != 0) {
    throw ArgumentError(std::string(what) + ": paired sampling needs an even sample count, got " + std::to_string(M));
  }
}

std::vector<double> cumulative_of(const std::vector<double>& masses) {
  std::vector<double> cumulative(masses.size());
  double running = 0.0;
  for (std::size_t k = 0; k < masses.size(); ++k) {
    running += masses[k];
    cumulative[k] = running;
  }
  return cumulative;
}

Attribution single_player(const CoalitionGame& game, Method method, std::int64_t M, const RandomSource& rng) {
  Attribution out;
  out.phi = Vector::Constant(1, game.v_all());
  out.method = method;
  out.samples_used = M;
  out.seed = rng.seed();
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

ValueCache::ValueCache(const CoalitionGame& game) : game_(game) {
  values_.emplace(0, game.v_empty());
  values_.emplace(FeatureSubset::full_mask(game.d()), game.v_full());
}

double ValueCache::operator()(const FeatureSubset& s) {
  const auto [it, inserted] = values_.try_emplace(s.bits(), 0.0);
  if (inserted) {
    it->second = game_(s);
    ++evaluations_;
  }
  return it->second;
}

// ---------------------------------------------------------------------------

KernelSampler::KernelSampler(const KernelWeights& weights)
    : d_(weights.d), cumulative_(cumulative_of(weights.size_probabilities)) {}

FeatureSubset KernelSampler::operator()(RandomSource& rng) const {
  const int size = sample_cumulative(cumulative_, rng);
  return uniform_subset_of_size(d_, size, rng);
}

KernelDraw sample_kernel_subset(const KernelWeights& weights, RandomSource& rng, bool paired) {
  if (weights.d < 2) throw DomainError("sample_kernel_subset: d must be >= 2");
  const FeatureSubset s = KernelSampler(weights)(rng);
  KernelDraw draw{s, std::nullopt};
  if (paired) draw.complement = s.complement();
  return draw;
}

SampledBatch sample_kernel_batch(ValueCache& values, const KernelWeights& weights, std::int64_t M, RandomSource& rng,
                                 bool paired) {
  require_samples(M, "sample_kernel_batch");
  require_even_if_paired(M, paired, "sample_kernel_batch");
  const KernelSampler sampler(weights);
  SampledBatch batch;
  batch.paired = paired;
  batch.subsets.reserve(static_cast<std::size_t>(M));
  batch.values.reserve(static_cast<std::size_t>(M));
  const std::int64_t draws = paired ? M / 2 : M;
  for (std::int64_t k = 0; k < draws; ++k) {
    const FeatureSubset s = sampler(rng);
    batch.subsets.push_back(s);
    batch.values.push_back(values(s));
    if (paired) {
      const FeatureSubset c = s.complement();
      batch.subsets.push_back(c);
      batch.values.push_back(values(c));
    }
  }
  return batch;
}

// ---------------------------------------------------------------------------

double estimate_semivalue_mc(const CoalitionGame& game, int feature, std::int64_t M, RandomSource& rng) {
  require_samples(M, "estimate_semivalue_mc");
  const int d = game.d();
  if (feature < 0 || feature >= d) throw ArgumentError("estimate_semivalue_mc: feature out of range");
  ValueCache values(game);
  const std::uint64_t self = std::uint64_t{1} << feature;
  double sum = 0.0;
  for (std::int64_t k = 0; k < M; ++k) {
    // p^sv puts mass 1/d on each predecessor-set size, uniform within the size.
    const int size = static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
    const FeatureSubset s = uniform_subset_of_size(d, size, rng, self);
    sum += values(s.with(feature)) - values(s);
  }
  return sum / static_cast<double>(M);
}

Attribution estimate_semivalue(const CoalitionGame& game, std::int64_t M, RandomSource& rng) {
  require_samples(M, "estimate_semivalue");
  Attribution out;
  out.phi.resize(game.d());
  for (int i = 0; i < game.d(); ++i) {
    RandomSource stream = rng.split(static_cast<std::uint64_t>(i));
    out.phi[i] = estimate_semivalue_mc(game, i, M, stream);
  }
  out.method = Method::semivalue;
  out.samples_used = M * game.d();
  out.seed = rng.seed();
  return out;
}

// ---------------------------------------------------------------------------

Attribution estimate_permutation(const CoalitionGame& game, std::int64_t M, RandomSource& rng, bool antithetical) {
  require_samples(M, "estimate_permutation");
  if (antithetical && M % 2 != 0) {
    throw ArgumentError("estimate_permutation: antithetical sampling needs an even M, got " + std::to_string(M));
  }
  const Method method = antithetical ? Method::antithetical : Method::permutation;
  const int d = game.d();
  if (d == 1) return single_player(game, method, M, rng);

  ValueCache values(game);
  Vector sum = Vector::Zero(d);
  auto walk = [&](const std::vector<int>& order, bool reverse) {
    std::uint64_t prefix = 0;
    double previous = game.v_empty();
    for (int k = 0; k < d; ++k) {
      const int p = order[static_cast<std::size_t>(reverse ? d - 1 - k : k)];
      prefix |= std::uint64_t{1} << p;
      const double current = values(FeatureSubset(prefix, d));
      sum[p] += current - previous;
      previous = current;
    }
  };
  const std::int64_t draws = antithetical ? M / 2 : M;
  for (std::int64_t k = 0; k < draws; ++k) {
    const auto order = random_permutation(d, rng);
    walk(order, false);
    if (antithetical) walk(order, true);
  }

  Attribution out;
  out.phi = sum / static_cast<double>(M);
  out.method = method;
  out.samples_used = M;
  out.seed = rng.seed();
  return out;
}

// ---------------------------------------------------------------------------

Vector solve_efficiency_constrained(const Matrix& A, const Vector& b, double v_all, double ridge, bool* ridged) {
  const auto d = A.rows();
  if (ridged != nullptr) *ridged = false;
  Eigen::LDLT<Matrix> ldlt(A);
  const auto pivots = ldlt.vectorD();
  const double scale = std::max(pivots.cwiseAbs().maxCoeff(), 1.0);
  const bool deficient = ldlt.info() != Eigen::Success || pivots.minCoeff() <= 1e-12 * scale;
  if (deficient) {
    warn("empirical KernelSHAP system is rank-deficient; adding ridge " + std::to_string(ridge) +
         " (consider a larger sample count)");
    ldlt.compute(A + ridge * Matrix::Identity(d, d));
    if (ridged != nullptr) *ridged = true;
  }
  const Vector ones = Vector::Ones(d);
  const Vector a_inv_b = ldlt.solve(b);
  const Vector a_inv_1 = ldlt.solve(ones);
  const double denom = ones.dot(a_inv_1);
  const Vector phi = a_inv_b - a_inv_1 * ((ones.dot(a_inv_b) - v_all) / denom);
  if (!phi.allFinite()) {
    throw SolverError("KernelSHAP solve produced non-finite values; increase the sample count or the ridge");
  }
  return phi;
}

Attribution estimate_kernelshap(const CoalitionGame& game, std::int64_t M, RandomSource& rng,
                                const KernelShapOptions& options) {
  require_samples(M, "estimate_kernelshap");
  const int d = game.d();
  if (d == 1) return single_player(game, Method::kernelshap, M, rng);
  if (M < d) {
    throw ArgumentError("estimate_kernelshap: need at least d=" + std::to_string(d) + " samples, got " +
                        std::to_string(M));
  }
  require_even_if_paired(M, options.paired, "estimate_kernelshap");

  const KernelWeights kw = kernel_normalizer(d);
  ValueCache values(game);
  const SampledBatch batch = sample_kernel_batch(values, kw, M, rng, options.paired);

  Matrix A = Matrix::Zero(d, d);
  Vector b = Vector::Zero(d);
  for (std::size_t k = 0; k < batch.subsets.size(); ++k) {
    const Vector z = batch.subsets[k].indicator();
    A.selfadjointView<Eigen::Lower>().rankUpdate(z);
    b += z * (batch.values[k] - game.v_empty());
  }
  A.triangularView<Eigen::StrictlyUpper>() = A.transpose();
  const double inv = 1.0 / static_cast<double>(batch.subsets.size());
  A *= inv;
  b *= inv;

  Attribution out;
  if (options.constrained) {
    out.phi = solve_efficiency_constrained(A, b, game.v_all(), options.ridge);
  } else {
    // Same regularization rule, no constraint; efficiency restored afterwards.
    Eigen::LDLT<Matrix> ldlt(A);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 1e-12 * ldlt.vectorD().cwiseAbs().maxCoeff()) {
      warn("empirical KernelSHAP system is rank-deficient; adding ridge");
      ldlt.compute(A + options.ridge * Matrix::Identity(d, d));
    }
    out.phi = additive_efficient_normalization(Vector(ldlt.solve(b)), game.v_all());
  }
  out.method = Method::kernelshap;
  out.samples_used = M;
  out.seed = rng.seed();
  return out;
}

Attribution estimate_kernelshap(const CoalitionGame& game, std::int64_t M, RandomSource& rng, bool paired) {
  KernelShapOptions options;
  options.paired = paired;
  return estimate_kernelshap(game, M, rng, options);
}

Matrix kernel_indicator_moments(int d) {
  const KernelWeights kw = kernel_normalizer(d);
  double on_diag = 0.0;
  double off_diag = 0.0;
  for (int s = 1; s < d; ++s) {
    const double p = kw.size_probability(s);
    on_diag += p * s / d;
    off_diag += p * s * (s - 1) / (static_cast<double>(d) * (d - 1));
  }
  return (on_diag - off_diag) * Matrix::Identity(d, d) + off_diag * Matrix::Ones(d, d);
}

Attribution estimate_kernelshap_unbiased(const CoalitionGame& game, std::int64_t M, RandomSource& rng) {
  require_samples(M, "estimate_kernelshap_unbiased");
  const int d = game.d();
  if (d < 2) throw DomainError("estimate_kernelshap_unbiased: d must be >= 2");

  const KernelWeights kw = kernel_normalizer(d);
  const Matrix A = kernel_indicator_moments(d);
  ValueCache values(game);
  const SampledBatch batch = sample_kernel_batch(values, kw, M, rng, false);
  Vector b = Vector::Zero(d);
  for (std::size_t k = 0; k < batch.subsets.size(); ++k) {
    for (std::uint64_t bits = batch.subsets[k].bits(); bits != 0; bits &= bits - 1) {
      b[std::countr_zero(bits)] += batch.values[k];
    }
  }
  b /= static_cast<double>(M);
  b -= A.diagonal() * game.v_empty();

  Attribution out;
  out.phi = solve_efficiency_constrained(A, b, game.v_all());
  out.method = Method::kernelshap_unbiased;
  out.samples_used = M;
  out.seed = rng.seed();
  return out;
}

// ---------------------------------------------------------------------------

Attribution estimate_unified(const UnifiedStochasticConfig& config, const CoalitionGame& game, std::int64_t M,
                             RandomSource& rng, bool paired) {
  require_samples(M, "estimate_unified");
  config.validate_for(game);
  require_even_if_paired(M, paired, "estimate_unified");
  const int d = game.d();
  ValueCache values(game);
  Vector tilde = Vector::Zero(d);
  std::int64_t drawn = 0;

  if (config.shared_sampling()) {
    std::vector<double> size_mass(static_cast<std::size_t>(d + 1), 0.0);
    for (int s = 0; s <= d; ++s) {
      size_mass[static_cast<std::size_t>(s)] = config.class_mass(s, true) + config.class_mass(s, false);
    }
    const auto cumulative = cumulative_of(size_mass);
    // Coefficients per (size, membership) are tabulated once.
    std::vector<double> coeff_in(static_cast<std::size_t>(d + 1)), coeff_out(static_cast<std::size_t>(d + 1));
    for (int s = 0; s <= d; ++s) {
      coeff_in[static_cast<std::size_t>(s)] = config.coeff(s, true);
      coeff_out[static_cast<std::size_t>(s)] = config.coeff(s, false);
    }
    auto accumulate = [&](const FeatureSubset& s) {
      const double v = values(s);
      const auto size = static_cast<std::size_t>(s.size());
      const double in = coeff_in[size] * v;
      const double out = coeff_out[size] * v;
      for (int i = 0; i < d; ++i) tilde[i] += s.contains(i) ? in : out;
    };
    const std::int64_t draws = paired ? M / 2 : M;
    for (std::int64_t k = 0; k < draws; ++k) {
      const int size = sample_cumulative(cumulative, rng);
      const FeatureSubset s = uniform_subset_of_size(d, size, rng);
      accumulate(s);
      if (paired) accumulate(s.complement());
    }
    tilde /= static_cast<double>(M);
    drawn = M;
  } else {
    if (paired) throw ArgumentError("estimate_unified: paired sampling needs a coordinate-independent distribution");
    // Classes indexed 2*s + contains.
    std::vector<double> masses(static_cast<std::size_t>(2 * (d + 1)), 0.0);
    for (int s = 0; s <= d; ++s) {
      masses[static_cast<std::size_t>(2 * s)] = config.class_mass(s, false);
      masses[static_cast<std::size_t>(2 * s + 1)] = config.class_mass(s, true);
    }
    const auto cumulative = cumulative_of(masses);
    for (int i = 0; i < d; ++i) {
      RandomSource stream = rng.split(static_cast<std::uint64_t>(i));
      const std::uint64_t self = std::uint64_t{1} << i;
      double sum = 0.0;
      for (std::int64_t k = 0; k < M; ++k) {
        const int cls = sample_cumulative(cumulative, stream);
        const int size = cls / 2;
        const bool contains = (cls % 2) == 1;
        FeatureSubset s = uniform_subset_of_size(d, contains ? size - 1 : size, stream, self);
        if (contains) s = s.with(i);
        sum += config.coeff(size, contains) * values(s);
      }
      tilde[i] = sum / static_cast<double>(M);
    }
    drawn = M * d;
  }

  Attribution out;
  out.phi = config.transform_matrix() * tilde + config.bias_vector(game.v_all());
  out.method = Method::unified;
  out.samples_used = drawn;
  out.seed = rng.seed();
  return out;
}

Attribution simshap_target(const CoalitionGame& game, std::int64_t M, RandomSource& rng, bool paired) {
  require_samples(M, "simshap_target");
  if (game.d() < 2) throw DomainError("simshap_target: d must be >= 2");
  Attribution out = estimate_unified(UnifiedStochasticConfig::simshap_row(game.d()), game, M, rng, paired);
  out.method = Method::simshap_sample;
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::string> estimator_ids() {
  return {"semivalue",      "permutation", "antithetical", "kernelshap",     "kernelshap-unbiased",
          "simshap-sample", "unified:sv",  "unified:lsv",  "unified:simshap"};
}

Estimator make_estimator(const std::string& id, bool paired) {
  if (id == "semivalue") {
    return [](const CoalitionGame& g, std::int64_t M, RandomSource& rng) { return estimate_semivalue(g, M, rng); };
  }
  if (id == "permutation" || id == "antithetical") {
    const bool anti = id == "antithetical";
    return [anti](const CoalitionGame& g, std::int64_t M, RandomSource& rng) {
      return estimate_permutation(g, M, rng, anti);
    };
  }
  if (id == "kernelshap") {
    return [paired](const CoalitionGame& g, std::int64_t M, RandomSource& rng) {
      return estimate_kernelshap(g, M, rng, paired);
    };
  }
  if (id == "kernelshap-unbiased") {
    return [](const CoalitionGame& g, std::int64_t M, RandomSource& rng) {
      return estimate_kernelshap_unbiased(g, M, rng);
    };
  }
  if (id == "simshap-sample") {
    return [paired](const CoalitionGame& g, std::int64_t M, RandomSource& rng) {
      return simshap_target(g, M, rng, paired);
    };
  }
  if (id.rfind("unified:", 0) == 0) {
    const std::string row = id.substr(8);
    UnifiedStochasticConfig::by_name(row, 2);  // reject unknown rows up front
    return [row, paired](const CoalitionGame& g, std::int64_t M, RandomSource& rng) {
      return estimate_unified(UnifiedStochasticConfig::by_name(row, g.d()), g, M, rng, paired);
    };
  }
  throw ArgumentError("unknown estimator '" + id + "'");
}

}  // namespace shapx

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

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "shapx/errors.hpp"

namespace shapx {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr int kMaxPlayers = 64;
inline constexpr int kMaxEnumerationPlayers = 24;

// Exact binomial coefficient C(n, k) for 0 <= k <= n <= 64.
std::uint64_t binomial(int n, int k);

// ---------------------------------------------------------------------------
// FeatureSubset
// ---------------------------------------------------------------------------

/// A coalition S of the player set N = {0, ..., d-1}, stored as a bit-set.
class FeatureSubset {
 public:
  FeatureSubset() = default;
  FeatureSubset(std::uint64_t bits, int d);

  static FeatureSubset empty(int d) { return FeatureSubset(0, d); }
  static FeatureSubset full(int d);
  static FeatureSubset singleton(int i, int d);
  static FeatureSubset from_indices(const std::vector<int>& indices, int d);

  std::uint64_t bits() const { return bits_; }
  int d() const { return d_; }
  int size() const { return std::popcount(bits_); }
  bool contains(int i) const { return (bits_ >> i) & 1U; }
  bool is_empty() const { return bits_ == 0; }
  bool is_full() const { return bits_ == full_mask(d_); }

  FeatureSubset with(int i) const { return FeatureSubset(bits_ | (std::uint64_t{1} << i), d_); }
  FeatureSubset without(int i) const { return FeatureSubset(bits_ & ~(std::uint64_t{1} << i), d_); }
  FeatureSubset complement() const { return FeatureSubset(~bits_ & full_mask(d_), d_); }

  /// The indicator vector 1^S in {0,1}^d.
  Vector indicator() const;
  std::vector<int> indices() const;

  friend bool operator==(const FeatureSubset&, const FeatureSubset&) = default;

  static constexpr std::uint64_t full_mask(int d) {
    return d >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << d) - 1;
  }

 private:
  std::uint64_t bits_ = 0;
  int d_ = 0;
};

struct FeatureSubsetHash {
  std::size_t operator()(const FeatureSubset& s) const noexcept { return std::hash<std::uint64_t>{}(s.bits()); }
};

/// Ascending-bit-order range over all subsets of d players.
class SubsetRange {
 public:
  class iterator {
   public:
    using value_type = FeatureSubset;
    using difference_type = std::ptrdiff_t;
    iterator() = default;
    iterator(std::uint64_t bits, int d) : bits_(bits), d_(d) {}
    FeatureSubset operator*() const { return FeatureSubset(bits_, d_); }
    iterator& operator++() {
      ++bits_;
      return *this;
    }
    iterator operator++(int) {
      auto tmp = *this;
      ++bits_;
      return tmp;
    }
    friend bool operator==(const iterator& a, const iterator& b) { return a.bits_ == b.bits_; }

   private:
    std::uint64_t bits_ = 0;
    int d_ = 0;
  };

  SubsetRange(int d, std::uint64_t first, std::uint64_t last) : d_(d), first_(first), last_(last) {}
  iterator begin() const { return {first_, d_}; }
  iterator end() const { return {last_, d_}; }
  std::uint64_t count() const { return last_ - first_; }

 private:
  int d_;
  std::uint64_t first_;
  std::uint64_t last_;
};

/// Every subset exactly once in ascending bit order; drops {} and N unless include_trivial.
/// Throws CapacityError for d > 24.
SubsetRange enumerate_subsets(int d, bool include_trivial);

// ---------------------------------------------------------------------------
// CoalitionGame
// ---------------------------------------------------------------------------

/// A value function v: P(N) -> R with v({}) and v(N) cached at construction.
class CoalitionGame {
 public:
  using ValueFn = std::function<double(const FeatureSubset&)>;

  CoalitionGame(int d, ValueFn fn);

  double operator()(const FeatureSubset& s) const { return fn_(s); }
  double evaluate(const FeatureSubset& s) const { return fn_(s); }

  int d() const { return d_; }
  double v_empty() const { return v_empty_; }
  double v_full() const { return v_full_; }
  double v_all() const { return v_full_ - v_empty_; }

 private:
  int d_;
  ValueFn fn_;
  double v_empty_;
  double v_full_;
};

/// alpha*v + beta*w over the same player set.
CoalitionGame combine_games(double alpha, const CoalitionGame& v, double beta, const CoalitionGame& w);

/// All 2^d values indexed by subset bits (d <= 24).
Vector value_table(const CoalitionGame& game);

// ---------------------------------------------------------------------------
// Attribution
// ---------------------------------------------------------------------------

enum class Method {
  exact_shapley,
  exact_random_order,
  exact_least_squares,
  exact_unified,
  semivalue,
  permutation,
  antithetical,
  kernelshap,
  kernelshap_unbiased,
  simshap_sample,
  unified,
  simshap_amortized,
  fastshap_amortized,
  linear_closed_form,
};

std::string_view to_string(Method m);
Method method_from_string(std::string_view name);

/// True for methods whose outputs sum to v(N) - v({}) by construction.
bool is_efficient_method(Method m);

struct Attribution {
  Vector phi;
  Method method = Method::exact_shapley;
  std::int64_t samples_used = 0;
  std::uint64_t seed = 0;

  int d() const { return static_cast<int>(phi.size()); }
  bool finite() const { return phi.allFinite(); }
};

// ---------------------------------------------------------------------------
// Shapley kernel
// ---------------------------------------------------------------------------

/// omega(d, s) = (d-1) / (C(d,s) s (d-s)) for 1 <= s <= d-1.
double shapley_kernel_weight(int d, int s);

struct KernelWeights {
  int d = 0;
  std::vector<double> omega_by_size;       // index s in 0..d; entries 0 and d unused (zero)
  std::vector<double> size_probabilities;  // C(d,s) omega(s) / gamma
  double gamma = 0.0;                      // sum over proper non-empty subsets of omega(S)

  double omega(int s) const { return omega_by_size.at(static_cast<std::size_t>(s)); }
  double size_probability(int s) const { return size_probabilities.at(static_cast<std::size_t>(s)); }
  /// p^ls(S) for a single subset of size s.
  double subset_probability(int s) const { return omega(s) / gamma; }
  /// gamma / (d - 1) = sum_s 1 / (s (d - s)); the scale that makes the sampled
  /// coefficient and least-squares transform unbiased.
  double coefficient_scale() const { return gamma / static_cast<double>(d - 1); }
};

KernelWeights kernel_normalizer(int d);

// ---------------------------------------------------------------------------
// RandomSource
// ---------------------------------------------------------------------------

/// Counter-based generator: draw k of stream (seed, stream) is a fixed function of
/// (seed, stream, k), so streams are reproducible on every platform and independent of
/// scheduling. Satisfies UniformRandomBitGenerator.
class RandomSource {
 public:
  using result_type = std::uint64_t;

  explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();

  /// Independent child stream, keyed on this stream's key and `stream`.
  RandomSource split(std::uint64_t stream) const;

  double uniform();                      // [0, 1)
  std::uint64_t below(std::uint64_t n);  // uniform in [0, n), unbiased
  double normal();                       // standard normal

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t counter() const { return counter_; }

 private:
  RandomSource(std::uint64_t seed, std::uint64_t stream, std::uint64_t key);

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

/// Uniform subset of exactly k players drawn from the players not in `excluded`.
FeatureSubset uniform_subset_of_size(int d, int k, RandomSource& rng, std::uint64_t excluded = 0);

std::vector<int> random_permutation(int d, RandomSource& rng);

/// Index drawn from a discrete distribution given its cumulative masses.
int sample_cumulative(const std::vector<double>& cumulative, RandomSource& rng);

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

using WarningHandler = std::function<void(const std::string&)>;

/// Replaces the process-wide warning sink (stderr by default); returns the previous one.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

// ---------------------------------------------------------------------------
// Numerics
// ---------------------------------------------------------------------------

/// Kahan-Babuska compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      c_ += (sum_ - t) + x;
    } else {
      c_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

}  // namespace shapx

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

#include "shapx/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <mutex>
#include <numeric>

namespace shapx {

std::uint64_t binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) {
    throw DomainError("binomial: require 0 <= k <= n, got n=" + std::to_string(n) + " k=" + std::to_string(k));
  }
  if (n > kMaxPlayers) {
    throw CapacityError("binomial: n=" + std::to_string(n) + " exceeds 64");
  }
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (int j = 1; j <= k; ++j) {
    // c * (n - k + j) / j stays integral at every step.
    c = c * static_cast<unsigned>(n - k + j) / static_cast<unsigned>(j);
  }
  if (c > std::numeric_limits<std::uint64_t>::max()) {
    throw CapacityError("binomial: C(" + std::to_string(n) + "," + std::to_string(k) + ") overflows 64 bits");
  }
  return static_cast<std::uint64_t>(c);
}

// ---------------------------------------------------------------------------

FeatureSubset::FeatureSubset(std::uint64_t bits, int d) : bits_(bits), d_(d) {
  if (d < 0 || d > kMaxPlayers) {
    throw CapacityError("FeatureSubset: d=" + std::to_string(d) + " outside 0..64");
  }
  if ((bits & ~full_mask(d)) != 0) {
    throw ArgumentError("FeatureSubset: bits outside player range");
  }
}

FeatureSubset FeatureSubset::full(int d) { return FeatureSubset(full_mask(d), d); }

FeatureSubset FeatureSubset::singleton(int i, int d) {
  if (i < 0 || i >= d) throw ArgumentError("FeatureSubset::singleton: index out of range");
  return FeatureSubset(std::uint64_t{1} << i, d);
}

FeatureSubset FeatureSubset::from_indices(const std::vector<int>& indices, int d) {
  std::uint64_t bits = 0;
  for (int i : indices) {
    if (i < 0 || i >= d) throw ArgumentError("FeatureSubset::from_indices: index out of range");
    bits |= std::uint64_t{1} << i;
  }
  return FeatureSubset(bits, d);
}

Vector FeatureSubset::indicator() const {
  Vector z(d_);
  for (int i = 0; i < d_; ++i) z[i] = contains(i) ? 1.0 : 0.0;
  return z;
}

std::vector<int> FeatureSubset::indices() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
  return out;
}

SubsetRange enumerate_subsets(int d, bool include_trivial) {
  if (d > kMaxEnumerationPlayers) {
    throw CapacityError("enumerate_subsets: d=" + std::to_string(d) + " exceeds 24");
  }
  if (d < 0) throw DomainError("enumerate_subsets: negative d");
  const std::uint64_t total = std::uint64_t{1} << d;
  if (include_trivial) return SubsetRange(d, 0, total);
  if (d == 0) return SubsetRange(d, 0, 0);
  return SubsetRange(d, 1, total - 1);
}

// ---------------------------------------------------------------------------

CoalitionGame::CoalitionGame(int d, ValueFn fn) : d_(d), fn_(std::move(fn)) {
  if (d < 1 || d > kMaxPlayers) {
    throw CapacityError("CoalitionGame: d=" + std::to_string(d) + " outside 1..64");
  }
  v_empty_ = fn_(FeatureSubset::empty(d));
  v_full_ = fn_(FeatureSubset::full(d));
}

CoalitionGame combine_games(double alpha, const CoalitionGame& v, double beta, const CoalitionGame& w) {
  if (v.d() != w.d()) throw ArgumentError("combine_games: player counts differ");
  return CoalitionGame(v.d(), [=](const FeatureSubset& s) { return alpha * v(s) + beta * w(s); });
}

Vector value_table(const CoalitionGame& game) {
  const auto range = enumerate_subsets(game.d(), true);
  Vector table(static_cast<Eigen::Index>(range.count()));
  Eigen::Index k = 0;
  for (const auto s : range) table[k++] = game(s);
  return table;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 14> kMethodNames{{
    {Method::exact_shapley, "exact_shapley"},
    {Method::exact_random_order, "exact_random_order"},
    {Method::exact_least_squares, "exact_least_squares"},
    {Method::exact_unified, "exact_unified"},
    {Method::semivalue, "semivalue"},
    {Method::permutation, "permutation"},
    {Method::antithetical, "antithetical"},
    {Method::kernelshap, "kernelshap"},
    {Method::kernelshap_unbiased, "kernelshap_unbiased"},
    {Method::simshap_sample, "simshap_sample"},
    {Method::unified, "unified"},
    {Method::simshap_amortized, "simshap_amortized"},
    {Method::fastshap_amortized, "fastshap_amortized"},
    {Method::linear_closed_form, "linear_closed_form"},
}};

}  // namespace

std::string_view to_string(Method m) {
  for (const auto& [method, name] : kMethodNames) {
    if (method == m) return name;
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  for (const auto& [method, n] : kMethodNames) {
    if (n == name) return method;
  }
  throw ArgumentError("unknown method '" + std::string(name) + "'");
}

bool is_efficient_method(Method m) {
  switch (m) {
    case Method::exact_shapley:
    case Method::exact_random_order:
    case Method::exact_least_squares:
    case Method::permutation:
    case Method::antithetical:
    case Method::kernelshap:
    case Method::kernelshap_unbiased:
    case Method::simshap_sample:
    case Method::fastshap_amortized:
      return true;
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------

double shapley_kernel_weight(int d, int s) {
  if (d < 2) throw DomainError("shapley_kernel_weight: d=" + std::to_string(d) + " has no proper subset");
  if (s < 1 || s > d - 1) {
    throw DomainError("shapley_kernel_weight: size " + std::to_string(s) + " outside 1.." + std::to_string(d - 1));
  }
  const std::uint64_t c = binomial(d, s);
  const auto ss = static_cast<std::uint64_t>(s);
  const auto rest = static_cast<std::uint64_t>(d - s);
  // Exact integer denominator whenever it is representable without rounding.
  if (c <= (std::uint64_t{1} << 53) / (ss * rest)) {
    return static_cast<double>(d - 1) / static_cast<double>(c * ss * rest);
  }
  return static_cast<double>(d - 1) / (static_cast<long double>(c) * ss * rest);
}

KernelWeights kernel_normalizer(int d) {
  if (d < 2) throw DomainError("kernel_normalizer: d=" + std::to_string(d) + " has no proper subset");
  KernelWeights kw;
  kw.d = d;
  kw.omega_by_size.assign(static_cast<std::size_t>(d + 1), 0.0);
  kw.size_probabilities.assign(static_cast<std::size_t>(d + 1), 0.0);
  // C(d,s) omega(d,s) = (d-1) / (s (d-s)): sum it per size class.
  std::vector<long double> class_mass(static_cast<std::size_t>(d + 1), 0.0L);
  long double gamma = 0.0L;
  for (int s = 1; s < d; ++s) {
    kw.omega_by_size[static_cast<std::size_t>(s)] = shapley_kernel_weight(d, s);
    class_mass[static_cast<std::size_t>(s)] = static_cast<long double>(d - 1) / (static_cast<long double>(s) * (d - s));
    gamma += class_mass[static_cast<std::size_t>(s)];
  }
  kw.gamma = static_cast<double>(gamma);
  for (int s = 1; s < d; ++s) {
    kw.size_probabilities[static_cast<std::size_t>(s)] = static_cast<double>(class_mass[static_cast<std::size_t>(s)] / gamma);
  }
  return kw;
}

// ---------------------------------------------------------------------------

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t derive_key(std::uint64_t parent, std::uint64_t stream) {
  return mix64(parent ^ mix64(stream * kGolden + 0x632be59bd9b4e019ULL));
}
}  // namespace

RandomSource::RandomSource(std::uint64_t seed, std::uint64_t stream)
    : RandomSource(seed, stream, derive_key(mix64(seed + kGolden), stream)) {}

RandomSource::RandomSource(std::uint64_t seed, std::uint64_t stream, std::uint64_t key)
    : seed_(seed), stream_(stream), key_(key) {}

RandomSource::result_type RandomSource::operator()() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

RandomSource RandomSource::split(std::uint64_t stream) const {
  return RandomSource(seed_, stream, derive_key(key_, stream));
}

double RandomSource::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomSource::below(std::uint64_t n) {
  if (n == 0) throw ArgumentError("RandomSource::below: empty range");
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = (*this)();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = (*this)();
      m = static_cast<unsigned __int128>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double RandomSource::normal() {
  // Box-Muller; one draw per call keeps the stream position a simple function of call count.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

FeatureSubset uniform_subset_of_size(int d, int k, RandomSource& rng, std::uint64_t excluded) {
  std::array<int, kMaxPlayers> pool{};
  int n = 0;
  for (int i = 0; i < d; ++i) {
    if (((excluded >> i) & 1U) == 0) pool[static_cast<std::size_t>(n++)] = i;
  }
  if (k < 0 || k > n) throw ArgumentError("uniform_subset_of_size: size out of range");
  std::uint64_t bits = 0;
  // Partial Fisher-Yates over the first k slots.
  for (int j = 0; j < k; ++j) {
    const auto pick = j + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - j)));
    std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(pick)]);
    bits |= std::uint64_t{1} << pool[static_cast<std::size_t>(j)];
  }
  return FeatureSubset(bits, d);
}

std::vector<int> random_permutation(int d, RandomSource& rng) {
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  for (int j = d - 1; j > 0; --j) {
    const auto pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(j + 1)));
    std::swap(order[static_cast<std::size_t>(j)], order[static_cast<std::size_t>(pick)]);
  }
  return order;
}

int sample_cumulative(const std::vector<double>& cumulative, RandomSource& rng) {
  const double u = rng.uniform() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  const auto idx = static_cast<int>(std::distance(cumulative.begin(), it));
  return std::min(idx, static_cast<int>(cumulative.size()) - 1);
}

// ---------------------------------------------------------------------------

namespace {
std::mutex& warning_mutex() {
  static std::mutex m;
  return m;
}
WarningHandler& warning_handler() {
  static WarningHandler h = [](const std::string& msg) { std::cerr << "shapx: warning: " << msg << '\n'; };
  return h;
}
}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(warning_mutex());
  auto previous = std::move(warning_handler());
  warning_handler() = std::move(handler);
  return previous;
}

void warn(const std::string& message) {
  std::lock_guard lock(warning_mutex());
  if (warning_handler()) warning_handler()(message);
}

}  // namespace shapx

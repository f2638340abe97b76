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

#include "shapx/exact.hpp"

#include <algorithm>
#include <numeric>

namespace shapx {

namespace {

void require_players(const CoalitionGame& game, int limit, const char* what) {
  if (game.d() > limit) {
    throw CapacityError(std::string(what) + ": d=" + std::to_string(game.d()) + " exceeds limit " +
                        std::to_string(limit));
  }
}

Attribution single_player(const CoalitionGame& game, Method method) {
  Attribution out;
  out.phi = Vector::Constant(1, game.v_all());
  out.method = method;
  return out;
}

// Plain summation below 12 players, compensated at and above.
class Accumulator {
 public:
  explicit Accumulator(int d) : compensated_(d >= 12) {}
  void add(double x) {
    if (compensated_) {
      kahan_.add(x);
    } else {
      plain_ += x;
    }
  }
  double value() const { return compensated_ ? kahan_.value() : plain_; }

 private:
  bool compensated_;
  double plain_ = 0.0;
  CompensatedSum kahan_;
};

}  // namespace

// ---------------------------------------------------------------------------

Permutation::Permutation(std::vector<int> order) : order_(std::move(order)) {
  std::vector<char> seen(order_.size(), 0);
  for (int p : order_) {
    if (p < 0 || p >= static_cast<int>(order_.size()) || seen[static_cast<std::size_t>(p)]) {
      throw ArgumentError("Permutation: order is not a bijection");
    }
    seen[static_cast<std::size_t>(p)] = 1;
  }
}

Permutation Permutation::identity(int d) {
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  return Permutation(std::move(order));
}

Permutation Permutation::reversed() const { return Permutation(std::vector<int>(order_.rbegin(), order_.rend())); }

FeatureSubset Permutation::predecessors(int i) const {
  std::uint64_t bits = 0;
  for (int p : order_) {
    if (p == i) return FeatureSubset(bits, d());
    bits |= std::uint64_t{1} << p;
  }
  throw ArgumentError("Permutation::predecessors: player not in permutation");
}

// ---------------------------------------------------------------------------

Attribution exact_shapley(const CoalitionGame& game) {
  require_players(game, kMaxExactShapleyPlayers, "exact_shapley");
  const int d = game.d();
  if (d == 1) return single_player(game, Method::exact_shapley);

  const Vector v = value_table(game);
  // |S|!(d-|S|-1)!/d! = 1 / (d C(d-1, |S|))
  std::vector<double> weight(static_cast<std::size_t>(d));
  for (int s = 0; s < d; ++s) weight[static_cast<std::size_t>(s)] = 1.0 / (d * static_cast<double>(binomial(d - 1, s)));

  std::vector<Accumulator> acc(static_cast<std::size_t>(d), Accumulator(d));
  const std::uint64_t total = std::uint64_t{1} << d;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    const double w = weight[static_cast<std::size_t>(std::min(std::popcount(bits), d - 1))];
    const double v_s = v[static_cast<Eigen::Index>(bits)];
    for (std::uint64_t rest = ~bits & (total - 1); rest != 0; rest &= rest - 1) {
      const int i = std::countr_zero(rest);
      const double gain = v[static_cast<Eigen::Index>(bits | (std::uint64_t{1} << i))] - v_s;
      acc[static_cast<std::size_t>(i)].add(w * gain);
    }
  }

  Attribution out;
  out.phi.resize(d);
  for (int i = 0; i < d; ++i) out.phi[i] = acc[static_cast<std::size_t>(i)].value();
  out.method = Method::exact_shapley;
  return out;
}

Attribution exact_random_order(const CoalitionGame& game) {
  require_players(game, kMaxRandomOrderPlayers, "exact_random_order");
  const int d = game.d();
  if (d == 1) return single_player(game, Method::exact_random_order);

  const Vector v = value_table(game);
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  Vector sum = Vector::Zero(d);
  std::uint64_t count = 0;
  do {
    std::uint64_t prefix = 0;
    double previous = v[0];
    for (int p : order) {
      prefix |= std::uint64_t{1} << p;
      const double current = v[static_cast<Eigen::Index>(prefix)];
      sum[p] += current - previous;
      previous = current;
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));

  Attribution out;
  out.phi = sum / static_cast<double>(count);
  out.method = Method::exact_random_order;
  return out;
}

Vector weighted_indicator_sum(const CoalitionGame& game) {
  const int d = game.d();
  const KernelWeights kw = kernel_normalizer(d);
  std::vector<Accumulator> acc(static_cast<std::size_t>(d), Accumulator(d));
  for (const auto s : enumerate_subsets(d, false)) {
    const double wv = kw.omega(s.size()) * game(s);
    for (std::uint64_t b = s.bits(); b != 0; b &= b - 1) acc[static_cast<std::size_t>(std::countr_zero(b))].add(wv);
  }
  Vector t(d);
  for (int i = 0; i < d; ++i) t[i] = acc[static_cast<std::size_t>(i)].value();
  return t;
}

Attribution exact_least_squares(const CoalitionGame& game) {
  require_players(game, kMaxLeastSquaresPlayers, "exact_least_squares");
  const int d = game.d();
  if (d == 1) return single_player(game, Method::exact_least_squares);

  const Vector t = weighted_indicator_sum(game);
  Attribution out;
  out.phi = (static_cast<double>(d) * t - Vector::Constant(d, t.sum())) / static_cast<double>(d - 1) +
            Vector::Constant(d, game.v_all() / d);
  out.method = Method::exact_least_squares;
  return out;
}

Attribution exact_unified_expectation(const UnifiedStochasticConfig& config, const CoalitionGame& game) {
  require_players(game, kMaxUnifiedExpectationPlayers, "exact_unified_expectation");
  config.validate_for(game);
  const int d = game.d();
  const bool trivial = config.domain == SubsetDomain::all_subsets;

  std::vector<Accumulator> acc(static_cast<std::size_t>(d), Accumulator(d));
  for (const auto s : enumerate_subsets(d, trivial)) {
    const int size = s.size();
    const double value = game(s);
    for (int i = 0; i < d; ++i) {
      const bool in = s.contains(i);
      acc[static_cast<std::size_t>(i)].add(config.prob(size, in) * config.coeff(size, in) * value);
    }
  }
  Vector tilde(d);
  for (int i = 0; i < d; ++i) tilde[i] = acc[static_cast<std::size_t>(i)].value();

  Attribution out;
  out.phi = config.transform_matrix() * tilde + config.bias_vector(game.v_all());
  out.method = Method::exact_unified;
  return out;
}

Matrix shapley_gram_by_enumeration(int d) {
  if (d < 2) throw DomainError("shapley_gram_by_enumeration: d must be >= 2");
  const KernelWeights kw = kernel_normalizer(d);
  Matrix gram = Matrix::Zero(d, d);
  for (const auto s : enumerate_subsets(d, false)) {
    const Vector z = s.indicator();
    gram.noalias() += kw.omega(s.size()) * z * z.transpose();
  }
  return gram;
}

double shapley_gram_offdiagonal(int d) {
  if (d < 2) throw DomainError("shapley_gram_offdiagonal: d must be >= 2");
  double harmonic = 0.0;
  for (int k = 1; k <= d - 1; ++k) harmonic += 1.0 / k;
  const double base = static_cast<double>(d - 1) / d;
  const double a = base * harmonic;
  return a - base;
}

Matrix shapley_gram_closed_form(int d) {
  const double b = shapley_gram_offdiagonal(d);
  return (static_cast<double>(d - 1) / d) * Matrix::Identity(d, d) + b * Matrix::Ones(d, d);
}

Vector unconstrained_least_squares(const CoalitionGame& game) {
  require_players(game, kMaxLeastSquaresPlayers, "unconstrained_least_squares");
  const int d = game.d();
  if (d < 2) throw DomainError("unconstrained_least_squares: d must be >= 2");
  const KernelWeights kw = kernel_normalizer(d);
  Vector rhs = Vector::Zero(d);
  for (const auto s : enumerate_subsets(d, false)) {
    rhs += kw.omega(s.size()) * (game(s) - game.v_empty()) * s.indicator();
  }
  return shapley_gram_closed_form(d).ldlt().solve(rhs);
}

}  // namespace shapx

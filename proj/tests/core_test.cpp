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

#include <gtest/gtest.h>

#include <set>

#include "shapx/core.hpp"
#include "shapx/errors.hpp"
#include "shapx/normalization.hpp"
#include "test_util.hpp"

namespace shapx {
namespace {

std::uint64_t pascal(int n, int k) {
  std::vector<std::vector<std::uint64_t>> t(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i) {
    t[i].assign(static_cast<std::size_t>(i + 1), 1);
    for (int j = 1; j < i; ++j) t[i][j] = t[i - 1][j - 1] + t[i - 1][j];
  }
  return t[n][k];
}

TEST(Binomial, SmallValues) {
  EXPECT_EQ(binomial(4, 2), 6u);
  EXPECT_EQ(binomial(12, 6), pascal(12, 6));
  EXPECT_EQ(binomial(12, 6), 924u);
  for (int d = 0; d <= 64; ++d) EXPECT_EQ(binomial(d, 0), 1u);
}

TEST(Binomial, MatchesPascalUpTo64) {
  for (int n = 0; n <= 64; ++n) {
    for (int k = 0; k <= n; ++k) ASSERT_EQ(binomial(n, k), pascal(n, k)) << n << "," << k;
  }
}

TEST(Binomial, RejectsOutOfRange) {
  EXPECT_THROW(binomial(3, 4), DomainError);
  EXPECT_THROW(binomial(3, -1), DomainError);
  EXPECT_THROW(binomial(65, 1), CapacityError);
}

TEST(FeatureSubset, ComplementAndIndicator) {
  RandomSource rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(64));
    const FeatureSubset s(rng() & FeatureSubset::full_mask(d), d);
    EXPECT_EQ(s.complement().complement(), s);
    EXPECT_LE(s.size(), d);
    const Vector ind = s.indicator();
    ASSERT_EQ(ind.size(), d);
    EXPECT_EQ(ind.sum(), s.size());
    EXPECT_EQ(s.size() + s.complement().size(), d);
    EXPECT_EQ(FeatureSubset::from_indices(s.indices(), d), s);
  }
}

TEST(FeatureSubset, FullAt64) {
  const FeatureSubset n = FeatureSubset::full(64);
  EXPECT_EQ(n.size(), 64);
  EXPECT_TRUE(n.is_full());
  EXPECT_TRUE(n.complement().is_empty());
}

TEST(FeatureSubset, RejectsBitsOutsideRange) {
  EXPECT_THROW(FeatureSubset(0b100, 2), ArgumentError);
  EXPECT_THROW(FeatureSubset::singleton(3, 3), ArgumentError);
}

TEST(ShapleyKernel, Examples) {
  EXPECT_DOUBLE_EQ(shapley_kernel_weight(4, 1), 0.25);
  EXPECT_DOUBLE_EQ(shapley_kernel_weight(2, 1), 0.5);
  // d = 8, s = 3: 7 / (56 * 3 * 5) reduced through factorials.
  const std::uint64_t c = 8 * 7 * 6 / (3 * 2 * 1);
  const std::uint64_t den = c * 3 * 5;
  EXPECT_EQ(shapley_kernel_weight(8, 3), 7.0 / static_cast<double>(den));
}

TEST(ShapleyKernel, SymmetricInSize) {
  for (int d = 2; d <= 40; ++d) {
    for (int s = 1; s < d; ++s) EXPECT_DOUBLE_EQ(shapley_kernel_weight(d, s), shapley_kernel_weight(d, d - s));
  }
}

TEST(ShapleyKernel, RejectsTrivialSizes) {
  EXPECT_THROW(shapley_kernel_weight(1, 1), DomainError);
  EXPECT_THROW(shapley_kernel_weight(4, 0), DomainError);
  EXPECT_THROW(shapley_kernel_weight(4, 4), DomainError);
  EXPECT_THROW(kernel_normalizer(1), DomainError);
}

TEST(KernelNormalizer, Examples) {
  EXPECT_NEAR(kernel_normalizer(3).gamma, 2.0, 1e-15);
  EXPECT_NEAR(kernel_normalizer(2).gamma, 1.0, 1e-15);
  double brute = 0.0;
  for (FeatureSubset s : enumerate_subsets(12, false)) brute += shapley_kernel_weight(12, s.size());
  EXPECT_NEAR(kernel_normalizer(12).gamma, brute, 1e-12 * brute);
}

TEST(KernelNormalizer, SizeDistributionSumsToOne) {
  for (int d = 2; d <= 16; ++d) {
    const KernelWeights w = kernel_normalizer(d);
    double gamma = 0.0;
    double total = 0.0;
    for (int s = 1; s < d; ++s) {
      EXPECT_GT(w.omega(s), 0.0);
      EXPECT_DOUBLE_EQ(w.omega(s), shapley_kernel_weight(d, s));
      gamma += static_cast<double>(binomial(d, s)) * w.omega(s);
      total += w.size_probability(s);
    }
    EXPECT_NEAR(w.gamma, gamma, 1e-12 * gamma);
    EXPECT_NEAR(total, 1.0, 1e-12);
    double harmonic = 0.0;
    for (int s = 1; s < d; ++s) harmonic += 1.0 / (s * (d - s));
    EXPECT_NEAR(w.coefficient_scale(), harmonic, 1e-12);
  }
}

TEST(EnumerateSubsets, Counts) {
  std::vector<std::uint64_t> two;
  for (FeatureSubset s : enumerate_subsets(2, false)) two.push_back(s.bits());
  EXPECT_EQ(two, (std::vector<std::uint64_t>{0b01, 0b10}));
  EXPECT_EQ(enumerate_subsets(3, true).count(), 8u);
  EXPECT_EQ(enumerate_subsets(10, false).count(), 1022u);
}

TEST(EnumerateSubsets, DistinctAndAscending) {
  for (int d = 1; d <= 12; ++d) {
    for (bool trivial : {false, true}) {
      std::set<std::uint64_t> seen;
      std::uint64_t prev = 0;
      bool first = true;
      for (FeatureSubset s : enumerate_subsets(d, trivial)) {
        EXPECT_TRUE(seen.insert(s.bits()).second);
        if (!first) EXPECT_GT(s.bits(), prev);
        prev = s.bits();
        first = false;
        if (!trivial) EXPECT_TRUE(!s.is_empty() && !s.is_full());
      }
      const std::uint64_t expected = (std::uint64_t{1} << d) - (trivial ? 0 : 2);
      EXPECT_EQ(seen.size(), d == 1 && !trivial ? 0u : expected);
    }
  }
}

TEST(EnumerateSubsets, CapacityGuard) { EXPECT_THROW(enumerate_subsets(25, true), CapacityError); }

TEST(CoalitionGame, CachesEndpoints) {
  int calls = 0;
  const CoalitionGame g(4, [&calls](const FeatureSubset& s) {
    ++calls;
    return 1.5 * s.size() + 0.25;
  });
  EXPECT_EQ(g.v_empty(), g(FeatureSubset::empty(4)));
  EXPECT_EQ(g.v_full(), g(FeatureSubset::full(4)));
  EXPECT_DOUBLE_EQ(g.v_all(), 6.0);
  EXPECT_THROW(CoalitionGame(65, [](const FeatureSubset&) { return 0.0; }), CapacityError);
}

TEST(CoalitionGame, CombineIsPointwise) {
  const CoalitionGame v = testing::random_game(5, 1);
  const CoalitionGame w = testing::random_game(5, 2);
  const CoalitionGame c = combine_games(2.0, v, -0.5, w);
  for (FeatureSubset s : enumerate_subsets(5, true)) EXPECT_DOUBLE_EQ(c(s), 2.0 * v(s) - 0.5 * w(s));
}

TEST(RandomSource, Reproducible) {
  RandomSource a(42, 7);
  RandomSource b(42, 7);
  for (int k = 0; k < 10000; ++k) ASSERT_EQ(a(), b());
  RandomSource c(42, 8);
  RandomSource d(43, 7);
  RandomSource e(42, 7);
  int same_c = 0;
  int same_d = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto x = e();
    same_c += c() == x;
    same_d += d() == x;
  }
  EXPECT_EQ(same_c, 0);
  EXPECT_EQ(same_d, 0);
}

TEST(RandomSource, KnownSequenceIsPlatformIndependent) {
  // Recorded draws; a change here silently changes every seeded run.
  RandomSource a(0, 0);
  EXPECT_EQ(a(), 16572387071653284832ull);
  EXPECT_EQ(a(), 5511752617075155802ull);
  EXPECT_EQ(a(), 10111098865191698984ull);
  EXPECT_EQ(RandomSource(12345, 7).split(3)(), 10283728962548720094ull);
  EXPECT_NE(RandomSource(0, 0).split(3)(), RandomSource(0, 0).split(4)());
}

TEST(RandomSource, SplitDoesNotAdvanceParent) {
  RandomSource a(9);
  RandomSource b(9);
  (void)a.split(1);
  EXPECT_EQ(a(), b());
}

TEST(RandomSource, UniformAndNormalMoments) {
  RandomSource rng(5);
  const int n = 200000;
  double su = 0.0;
  double sn = 0.0;
  double sn2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 5 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sn / n, 0.0, 5 / std::sqrt(n));
  EXPECT_NEAR(sn2 / n, 1.0, 5 * std::sqrt(2.0 / n));
}

TEST(RandomSource, BelowIsUniform) {
  RandomSource rng(6);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int k = 0; k < n; ++k) ++counts[rng.below(7)];
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 5 * std::sqrt(n / 7.0));
  EXPECT_THROW(rng.below(0), ArgumentError);
}

TEST(RandomSubset, UniformOfSizeRespectsExclusion) {
  RandomSource rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    const FeatureSubset s = uniform_subset_of_size(10, 4, rng, 0b1);
    EXPECT_EQ(s.size(), 4);
    EXPECT_FALSE(s.contains(0));
  }
  EXPECT_THROW(uniform_subset_of_size(3, 4, rng), ArgumentError);
}

TEST(RandomPermutation, IsBijection) {
  RandomSource rng(10);
  for (int d : {1, 2, 7, 64}) {
    std::vector<int> p = random_permutation(d, rng);
    std::sort(p.begin(), p.end());
    for (int i = 0; i < d; ++i) EXPECT_EQ(p[static_cast<std::size_t>(i)], i);
  }
}

TEST(AdditiveEfficientNormalization, Examples) {
  const Vector zero = Vector::Zero(3);
  EXPECT_TRUE(additive_efficient_normalization(zero, 3.0).isApprox(Vector::Ones(3)));
  const Vector efficient{{1.0, -2.0, 4.0}};
  EXPECT_LT(testing::max_abs_diff(additive_efficient_normalization(efficient, 3.0), efficient), 1e-15);
}

TEST(AdditiveEfficientNormalization, EfficientAndIdempotent) {
  RandomSource rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    Vector phi(5);
    for (int i = 0; i < 5; ++i) phi[i] = 10.0 * rng.normal();
    const double v_all = rng.normal();
    const Vector once = additive_efficient_normalization(phi, v_all);
    EXPECT_NEAR(once.sum(), v_all, 1e-12);
    EXPECT_LT(testing::max_abs_diff(additive_efficient_normalization(once, v_all), once), 1e-12);
  }
}

TEST(Method, RoundTripsNames) {
  for (Method m : {Method::exact_shapley, Method::kernelshap, Method::simshap_sample, Method::fastshap_amortized}) {
    EXPECT_EQ(method_from_string(to_string(m)), m);
  }
  EXPECT_THROW(method_from_string("nope"), ArgumentError);
}

TEST(CompensatedSum, BeatsNaiveSummation) {
  CompensatedSum s;
  s.add(1.0);
  for (int k = 0; k < 1000; ++k) s.add(1e-16);
  EXPECT_DOUBLE_EQ(s.value(), 1.0 + 1e-13);
}

}  // namespace
}  // namespace shapx

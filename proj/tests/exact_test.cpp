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

#include "shapx/errors.hpp"
#include "shapx/exact.hpp"
#include "shapx/models.hpp"
#include "shapx/unified.hpp"
#include "test_util.hpp"

namespace shapx {
namespace {

using testing::max_abs_diff;
using testing::random_game;

TEST(ExactShapley, AdditiveGameReturnsCoefficients) {
  const Attribution a = exact_shapley(additive_game(Vector{{1.0, 2.0, 3.0}}));
  EXPECT_LT(max_abs_diff(a.phi, Vector{{1.0, 2.0, 3.0}}), 1e-14);
  EXPECT_EQ(a.method, Method::exact_shapley);
}

TEST(ExactShapley, GloveGame) {
  EXPECT_LT(max_abs_diff(exact_shapley(testing::glove3()).phi, testing::glove3_shapley()), 1e-14);
}

TEST(ExactShapley, SquaredSizeGameIsSymmetric) {
  const CoalitionGame g(4, [](const FeatureSubset& s) { return double(s.size() * s.size()); });
  EXPECT_LT(max_abs_diff(exact_shapley(g).phi, Vector::Constant(4, 4.0)), 1e-12);
}

TEST(ExactShapley, MatchesIndependentBruteForce) {
  for (int d = 1; d <= 10; ++d) {
    const CoalitionGame g = random_game(d, 100 + d);
    const Attribution a = exact_shapley(g);
    EXPECT_LT(max_abs_diff(a.phi, testing::brute_force_shapley(g)), 1e-12) << d;
    EXPECT_NEAR(a.phi.sum(), g.v_all(), 1e-10);
  }
}

TEST(ExactShapley, SinglePlayer) {
  const CoalitionGame g(1, [](const FeatureSubset& s) { return s.is_empty() ? 0.5 : 2.0; });
  for (const Attribution& a : {exact_shapley(g), exact_random_order(g), exact_least_squares(g)}) {
    ASSERT_EQ(a.d(), 1);
    EXPECT_DOUBLE_EQ(a.phi[0], 1.5);
  }
}

TEST(ExactShapley, CapacityLimits) {
  EXPECT_THROW(exact_shapley(random_game(21, 0)), CapacityError);
  EXPECT_THROW(exact_random_order(random_game(9, 0)), CapacityError);
  EXPECT_THROW(exact_least_squares(random_game(17, 0)), CapacityError);
  EXPECT_THROW(exact_unified_expectation(UnifiedStochasticConfig::simshap_row(15), random_game(15, 0)),
               CapacityError);
}

TEST(ExactRandomOrder, GloveGame) {
  EXPECT_LT(max_abs_diff(exact_random_order(testing::glove3()).phi, testing::glove3_shapley()), 1e-14);
}

TEST(ExactLeastSquares, GloveAndConstantGames) {
  EXPECT_LT(max_abs_diff(exact_least_squares(testing::glove3()).phi, testing::glove3_shapley()), 1e-14);
  const CoalitionGame constant(6, [](const FeatureSubset&) { return 3.25; });
  EXPECT_LT(exact_least_squares(constant).phi.cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT(exact_shapley(constant).phi.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ExactOracles, PairwiseAgreementOnRandomGames) {
  RandomSource rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(7));  // 2..8
    const CoalitionGame g = random_game(d, rng());
    const Vector sv = exact_shapley(g).phi;
    const Vector ro = exact_random_order(g).phi;
    const Vector ls = exact_least_squares(g).phi;
    EXPECT_LT(max_abs_diff(sv, ro), 1e-8);
    EXPECT_LT(max_abs_diff(sv, ls), 1e-8);
    EXPECT_LT(max_abs_diff(ro, ls), 1e-8);
  }
}

TEST(ExactOracles, LeastSquaresAgreesUpTo12) {
  for (int d = 9; d <= 12; ++d) {
    const CoalitionGame g = random_game(d, 7 * d);
    EXPECT_LT(max_abs_diff(exact_shapley(g).phi, exact_least_squares(g).phi), 1e-8) << d;
  }
}

TEST(ExactOracles, DummyPlayerGetsZero) {
  // Player 2 never changes the value.
  const CoalitionGame base = random_game(6, 3);
  const CoalitionGame g(6, [base](const FeatureSubset& s) { return base(s.without(2)); });
  EXPECT_EQ(exact_shapley(g).phi[2], 0.0);
  EXPECT_EQ(exact_random_order(g).phi[2], 0.0);
  EXPECT_NEAR(exact_least_squares(g).phi[2], 0.0, 1e-13);
}

TEST(ExactOracles, InterchangeablePlayersShareValue) {
  // v depends on players 1 and 4 only through how many of them are present.
  const CoalitionGame base = random_game(6, 4);
  const CoalitionGame g(6, [base](const FeatureSubset& s) {
    FeatureSubset t = s.without(1).without(4);
    const int k = int(s.contains(1)) + int(s.contains(4));
    if (k >= 1) t = t.with(1);
    if (k == 2) t = t.with(4);
    return base(t);
  });
  for (const Attribution& a : {exact_shapley(g), exact_random_order(g), exact_least_squares(g)}) {
    EXPECT_NEAR(a.phi[1], a.phi[4], 1e-10);
  }
}

TEST(ExactOracles, Linearity) {
  RandomSource rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(9));
    const CoalitionGame v = random_game(d, rng());
    const CoalitionGame w = random_game(d, rng());
    const double alpha = rng.normal();
    const double beta = rng.normal();
    const Vector lhs = exact_shapley(combine_games(alpha, v, beta, w)).phi;
    const Vector rhs = alpha * exact_shapley(v).phi + beta * exact_shapley(w).phi;
    EXPECT_LT(max_abs_diff(lhs, rhs), 1e-10);
  }
}

TEST(ExactUnified, TableRowsAreUnbiased) {
  RandomSource rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(9));  // 2..10
    const CoalitionGame g = random_game(d, rng());
    const Vector truth = exact_shapley(g).phi;
    for (const char* row : {"sv", "lsv", "simshap"}) {
      const Attribution a = exact_unified_expectation(UnifiedStochasticConfig::by_name(row, d), g);
      EXPECT_LT(max_abs_diff(a.phi, truth), 1e-10) << row << " d=" << d;
    }
  }
}

TEST(ExactUnified, LeastSquaresRowMatchesClosedForm) {
  for (int d = 2; d <= 10; ++d) {
    const CoalitionGame g = random_game(d, 50 + d);
    const Attribution a = exact_unified_expectation(UnifiedStochasticConfig::least_squares_row(d), g);
    EXPECT_LT(max_abs_diff(a.phi, exact_least_squares(g).phi), 1e-10);
  }
}

TEST(ExactUnified, RejectsMismatchedConfig) {
  EXPECT_THROW(exact_unified_expectation(UnifiedStochasticConfig::simshap_row(5), random_game(6, 0)), ConfigError);
  EXPECT_THROW(UnifiedStochasticConfig::by_name("nope", 4), ConfigError);
  EXPECT_THROW(UnifiedStochasticConfig::simshap_row(1), ConfigError);
}

TEST(Gram, EnumerationMatchesClosedForm) {
  for (int d = 2; d <= 10; ++d) {
    EXPECT_LT((shapley_gram_by_enumeration(d) - shapley_gram_closed_form(d)).cwiseAbs().maxCoeff(), 1e-12) << d;
  }
}

TEST(Gram, EntriesFromSizeClassSums) {
  // Diagonal: sum over sizes of C(d-1, s-1) omega(s); off-diagonal: C(d-2, s-2) omega(s).
  for (int d = 2; d <= 10; ++d) {
    double diag = 0.0;
    double off = 0.0;
    for (int s = 1; s < d; ++s) {
      diag += static_cast<double>(binomial(d - 1, s - 1)) * shapley_kernel_weight(d, s);
      if (s >= 2) off += static_cast<double>(binomial(d - 2, s - 2)) * shapley_kernel_weight(d, s);
    }
    double harmonic = 0.0;
    for (int i = 1; i < d; ++i) harmonic += 1.0 / (d - i);
    const double a = (d - 1.0) / d * harmonic;
    EXPECT_NEAR(diag, a, 1e-12);
    EXPECT_NEAR(off, a - (d - 1.0) / d, 1e-12);
    EXPECT_NEAR(shapley_gram_offdiagonal(d), off, 1e-12);
    const Matrix m = shapley_gram_closed_form(d);
    EXPECT_NEAR(m(0, 0), diag, 1e-12);
    if (d > 2) EXPECT_NEAR(m(0, 1), off, 1e-12);
  }
}

TEST(UnconstrainedLeastSquares, SolvesNormalEquations) {
  for (int d = 2; d <= 8; ++d) {
    const CoalitionGame g = random_game(d, 90 + d);
    const Vector g_star = unconstrained_least_squares(g);
    // U^T W v_delta by enumeration, independent of the library helper.
    Vector rhs = Vector::Zero(d);
    for (FeatureSubset s : enumerate_subsets(d, false)) {
      rhs += shapley_kernel_weight(d, s.size()) * (g(s) - g.v_empty()) * s.indicator();
    }
    EXPECT_LT(max_abs_diff(shapley_gram_by_enumeration(d) * g_star, rhs), 1e-10);
  }
}

TEST(Permutation, Basics) {
  const Permutation p({2, 0, 1});
  EXPECT_EQ(p.predecessors(2), FeatureSubset::empty(3));
  EXPECT_EQ(p.predecessors(1), FeatureSubset::from_indices({0, 2}, 3));
  EXPECT_EQ(p.reversed().order(), (std::vector<int>{1, 0, 2}));
  EXPECT_THROW(Permutation({0, 0, 1}), ArgumentError);
  EXPECT_EQ(Permutation::identity(4).order(), (std::vector<int>{0, 1, 2, 3}));
}

}  // namespace
}  // namespace shapx

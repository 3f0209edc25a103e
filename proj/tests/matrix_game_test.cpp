// Copyright 2026 The Arena Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "arena/matrix_game.hpp"

#include <gtest/gtest.h>

#include <limits>

namespace arena {
namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix random_matrix(Rng& rng, int m, int n) {
  Matrix a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  return a;
}

double max_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Worst case of a row strategy over column replies, and vice versa.
double row_guarantee(const Matrix& a, const MixedStrategy& x) {
  return (a.transpose() * x.probabilities).minCoeff();
}
double col_guarantee(const Matrix& a, const MixedStrategy& y) {
  return (a * y.probabilities).maxCoeff();
}

const Matrix kPennies = mat({{1, -1}, {-1, 1}});
const Matrix kRps = mat({{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}});

TEST(LemkeHowson, PrisonersDilemmaIsMutualDefection) {
  BimatrixGame pd(mat({{-1, -3}, {0, -2}}), mat({{-1, 0}, {-3, -2}}));
  GameSolution s = lemke_howson(pd);
  EXPECT_EQ(s.strategy_row[1], 1.0);
  EXPECT_EQ(s.strategy_col[1], 1.0);
  EXPECT_DOUBLE_EQ(s.value_row, -2.0);
  EXPECT_DOUBLE_EQ(s.value_col, -2.0);
}

TEST(LemkeHowson, MatchingPenniesIsUniform) {
  GameSolution s = lemke_howson(BimatrixGame::zero_sum(kPennies));
  EXPECT_NEAR(s.strategy_row[0], 0.5, 1e-12);
  EXPECT_NEAR(s.strategy_col[0], 0.5, 1e-12);
  EXPECT_NEAR(s.value_row, 0.0, 1e-12);
}

TEST(LemkeHowson, EveryInitialLabelYieldsAnEquilibrium) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    BimatrixGame g(random_matrix(rng, 3, 4), random_matrix(rng, 3, 4));
    for (int label = 0; label < 7; ++label) {
      GameSolution s = lemke_howson(g, label);
      EXPECT_TRUE(s.strategy_row.valid());
      EXPECT_TRUE(s.strategy_col.valid());
      EXPECT_LE(deviation_residual(g, s), kDeviationTolerance);
    }
  }
}

TEST(LemkeHowson, RandomThreeByThreeMatchesSupportEnumeration) {
  Rng rng(2020);
  for (int trial = 0; trial < 50; ++trial) {
    BimatrixGame g(random_matrix(rng, 3, 3), random_matrix(rng, 3, 3));
    GameSolution s = lemke_howson(g);
    EXPECT_LE(deviation_residual(g, s), kDeviationTolerance);
    auto all = support_enumeration(g);
    ASSERT_FALSE(all.empty());
    bool member = false;
    for (const auto& e : all) {
      if (max_diff(e.strategy_row.probabilities, s.strategy_row.probabilities) < 1e-6 &&
          max_diff(e.strategy_col.probabilities, s.strategy_col.probabilities) < 1e-6) {
        member = true;
      }
    }
    EXPECT_TRUE(member) << "trial " << trial;
  }
}

TEST(LemkeHowson, DegenerateConstantGameTerminates) {
  GameSolution s = lemke_howson(BimatrixGame::zero_sum(Matrix::Zero(3, 3)));
  EXPECT_TRUE(s.strategy_row.valid());
  EXPECT_TRUE(s.strategy_col.valid());
  EXPECT_EQ(s.value_row, 0.0);
}

TEST(LemkeHowson, DegenerateGameWithTiedColumns) {
  // Two identical columns, so several column supports are payoff-equivalent.
  BimatrixGame g(mat({{1, 1, 0}, {0, 0, 1}}), mat({{0, 0, 1}, {1, 1, 0}}));
  for (int label = 0; label < 5; ++label) {
    GameSolution s = lemke_howson(g, label);
    EXPECT_LE(deviation_residual(g, s), kDeviationTolerance);
  }
}

TEST(LemkeHowson, RejectsBadInput) {
  Matrix bad = kPennies;
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    BimatrixGame g(bad, -bad);
    FAIL();
  } catch (const ArenaError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteEntry);
  }
  EXPECT_THROW(lemke_howson(BimatrixGame::zero_sum(kPennies), 4), ArenaError);
  EXPECT_THROW(BimatrixGame(Matrix::Zero(2, 2), Matrix::Zero(2, 3)), ArenaError);
}

TEST(ZeroSumSolve, KnownValues) {
  GameSolution mp = zero_sum_solve(kPennies);
  EXPECT_NEAR(mp.value_row, 0.0, 1e-12);
  EXPECT_NEAR(mp.strategy_row[0], 0.5, 1e-12);
  EXPECT_NEAR(mp.strategy_col[1], 0.5, 1e-12);

  GameSolution rps = zero_sum_solve(kRps);
  EXPECT_NEAR(rps.value_row, 0.0, 1e-12);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(rps.strategy_row[i], 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(rps.strategy_col[i], 1.0 / 3.0, 1e-12);
  }

  GameSolution one = zero_sum_solve(mat({{2}}));
  EXPECT_EQ(one.value_row, 2.0);
  EXPECT_EQ(one.value_col, -2.0);
  EXPECT_EQ(one.strategy_row[0], 1.0);
}

TEST(ZeroSumSolve, GuaranteesAndDualityOnRandomGames) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + rng.index(6);
    const int n = 1 + rng.index(6);
    Matrix a = random_matrix(rng, m, n);
    GameSolution s = zero_sum_solve(a);
    EXPECT_NEAR(s.value_row, -s.value_col, 1e-9);
    const double lower = row_guarantee(a, s.strategy_row);
    const double upper = col_guarantee(a, s.strategy_col);
    EXPECT_GE(lower, s.value_row - kDeviationTolerance);
    EXPECT_LE(upper, s.value_row + kDeviationTolerance);
    EXPECT_LE(upper - lower, kDeviationTolerance);
    EXPECT_LE(pure_maximin(a).value, s.value_row + kDeviationTolerance);
  }
}

TEST(ZeroSumSolve, PositiveScalingEquivariance) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix a = random_matrix(rng, 2 + rng.index(4), 2 + rng.index(4));
    const double c = rng.uniform(0.01, 100.0);
    GameSolution s = zero_sum_solve(a);
    GameSolution t = zero_sum_solve(c * a);
    EXPECT_LE(max_diff(s.strategy_row.probabilities, t.strategy_row.probabilities), 1e-8);
    EXPECT_LE(max_diff(s.strategy_col.probabilities, t.strategy_col.probabilities), 1e-8);
    EXPECT_NEAR(t.value_row, c * s.value_row, 1e-8 * std::max(1.0, c));
  }
}

TEST(ZeroSumSolve, LargeJointActionMatrix) {
  Rng rng(3);
  Matrix a = random_matrix(rng, 125, 5);
  GameSolution s = zero_sum_solve(a);
  EXPECT_TRUE(s.strategy_row.valid());
  EXPECT_LE(deviation_residual(BimatrixGame::zero_sum(a), s), kDeviationTolerance);
}

TEST(PureMaximin, Examples) {
  PureMaximin p = pure_maximin(kPennies);
  EXPECT_EQ(p.row, 0);
  EXPECT_EQ(p.col, 1);
  EXPECT_EQ(p.value, -1.0);

  // Row minima are (1, 0) by enumeration.
  PureMaximin q = pure_maximin(mat({{3, 1}, {0, 2}}));
  EXPECT_EQ(q.row, 0);
  EXPECT_EQ(q.col, 1);
  EXPECT_EQ(q.value, 1.0);

  PureMaximin r = pure_maximin(mat({{5}}));
  EXPECT_EQ(r.row, 0);
  EXPECT_EQ(r.col, 0);
  EXPECT_EQ(r.value, 5.0);
}

TEST(PureMaximin, RejectsNonFinite) {
  Matrix a = kPennies;
  a(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(pure_maximin(a), ArenaError);
}

TEST(SupportEnumeration, KnownGames) {
  BimatrixGame pd(mat({{-1, -3}, {0, -2}}), mat({{-1, 0}, {-3, -2}}));
  auto pd_eq = support_enumeration(pd);
  bool has_defect = false;
  for (const auto& e : pd_eq) has_defect |= (e.strategy_row[1] == 1.0 && e.strategy_col[1] == 1.0);
  EXPECT_TRUE(has_defect);

  auto mp_eq = support_enumeration(BimatrixGame::zero_sum(kPennies));
  ASSERT_EQ(mp_eq.size(), 1u);
  EXPECT_NEAR(mp_eq[0].strategy_row[0], 0.5, 1e-12);
  EXPECT_NEAR(mp_eq[0].strategy_col[0], 0.5, 1e-12);
}

TEST(SupportEnumeration, ContainsLemkeHowsonOnTwoByTwo) {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    BimatrixGame g(random_matrix(rng, 2, 2), random_matrix(rng, 2, 2));
    GameSolution s = lemke_howson(g);
    bool member = false;
    for (const auto& e : support_enumeration(g)) {
      EXPECT_LE(deviation_residual(g, e), kDeviationTolerance);
      member |= max_diff(e.strategy_row.probabilities, s.strategy_row.probabilities) < 1e-6 &&
                max_diff(e.strategy_col.probabilities, s.strategy_col.probabilities) < 1e-6;
    }
    EXPECT_TRUE(member);
  }
}

TEST(SupportEnumeration, SizeLimit) {
  try {
    support_enumeration(BimatrixGame::zero_sum(Matrix::Zero(6, 2)));
    FAIL();
  } catch (const ArenaError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSizeLimitExceeded);
  }
}

TEST(ExpectedPayoff, Examples) {
  EXPECT_EQ(expected_payoff(kPennies, MixedStrategy::uniform(2), MixedStrategy::uniform(2)), 0.0);
  EXPECT_EQ(expected_payoff(mat({{3, 1}, {0, 2}}), MixedStrategy::pure(2, 0), MixedStrategy::pure(2, 1)), 1.0);
  Vector row(2);
  row << 0.7, 0.3;
  EXPECT_NEAR(expected_payoff(kPennies, MixedStrategy(row), MixedStrategy::pure(2, 0)), 0.4, 1e-15);
  EXPECT_THROW(expected_payoff(kPennies, MixedStrategy::uniform(3), MixedStrategy::uniform(2)), ArenaError);
}

}  // namespace
}  // namespace arena

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

#pragma once

// Exact solution of small bimatrix and zero-sum matrix games.
//
// Lemke-Howson runs on two tableaux whose columns are indexed by label:
// labels [0, m) are the row player's actions and labels [m, m+n) are the
// column player's. For the row polytope P = {x >= 0 : B^T x <= 1} the column
// of label i < m holds x_i and the column of label m+j holds the slack of
// constraint j. For the column polytope Q = {y >= 0 : A y <= 1} label i < m
// is the slack of row constraint i and label m+j is y_j. Payoffs are shifted
// and rescaled to [1, 2] first so both polytopes are bounded, which leaves
// the equilibrium set unchanged.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "arena/common.hpp"

namespace arena {

inline constexpr double kDeviationTolerance = 1e-8;
inline constexpr double kProbabilitySumTolerance = 1e-9;

struct MixedStrategy {
  Vector probabilities;

  MixedStrategy() = default;
  explicit MixedStrategy(Vector p) : probabilities(std::move(p)) {}

  static MixedStrategy pure(int size, int action) {
    Vector p = Vector::Zero(size);
    p[action] = 1.0;
    return MixedStrategy(std::move(p));
  }

  static MixedStrategy uniform(int size) {
    return MixedStrategy(Vector::Constant(size, 1.0 / size));
  }

  int size() const { return static_cast<int>(probabilities.size()); }
  double operator[](int i) const { return probabilities[i]; }

  bool valid() const {
    if (probabilities.size() == 0) return false;
    if ((probabilities.array() < 0.0).any()) return false;
    return std::abs(probabilities.sum() - 1.0) <= kProbabilitySumTolerance;
  }

  // Clamps tiny negatives left over from pivoting and renormalizes.
  static MixedStrategy normalized(Vector p) {
    for (int i = 0; i < p.size(); ++i) {
      if (p[i] < 0.0 && p[i] > -1e-12) p[i] = 0.0;
    }
    const double total = p.sum();
    if (total > 0.0) p /= total;
    return MixedStrategy(std::move(p));
  }
};

class BimatrixGame {
 public:
  BimatrixGame(Matrix payoff_row, Matrix payoff_col)
      : payoff_row_(std::move(payoff_row)), payoff_col_(std::move(payoff_col)) {
    if (payoff_row_.rows() < 1 || payoff_row_.cols() < 1 ||
        payoff_row_.rows() != payoff_col_.rows() ||
        payoff_row_.cols() != payoff_col_.cols()) {
      throw ArenaError(ErrorCode::kDimensionMismatch,
                       "bimatrix payoffs must share a non-empty shape");
    }
    if (!payoff_row_.allFinite() || !payoff_col_.allFinite()) {
      throw ArenaError(ErrorCode::kNonFiniteEntry, "payoff matrix has a non-finite entry");
    }
  }

  static BimatrixGame zero_sum(const Matrix& payoff) { return BimatrixGame(payoff, -payoff); }

  const Matrix& payoff_row() const { return payoff_row_; }
  const Matrix& payoff_col() const { return payoff_col_; }
  int rows() const { return static_cast<int>(payoff_row_.rows()); }
  int cols() const { return static_cast<int>(payoff_row_.cols()); }

  bool is_zero_sum() const { return (payoff_col_.array() == -payoff_row_.array()).all(); }

 private:
  Matrix payoff_row_;
  Matrix payoff_col_;
};

struct GameSolution {
  MixedStrategy strategy_row;
  MixedStrategy strategy_col;
  double value_row = 0.0;
  double value_col = 0.0;
};

struct PureMaximin {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

inline double expected_payoff(const Matrix& payoff, const MixedStrategy& row,
                              const MixedStrategy& col) {
  if (row.size() != payoff.rows() || col.size() != payoff.cols()) {
    throw ArenaError(ErrorCode::kDimensionMismatch, "strategy sizes do not match payoff shape");
  }
  return row.probabilities.dot(payoff * col.probabilities);
}

// Largest gain any player can get from a pure unilateral deviation.
inline double deviation_residual(const BimatrixGame& game, const GameSolution& s) {
  const Vector row_payoffs = game.payoff_row() * s.strategy_col.probabilities;
  const Vector col_payoffs = game.payoff_col().transpose() * s.strategy_row.probabilities;
  const double row_value = expected_payoff(game.payoff_row(), s.strategy_row, s.strategy_col);
  const double col_value = expected_payoff(game.payoff_col(), s.strategy_row, s.strategy_col);
  return std::max(row_payoffs.maxCoeff() - row_value, col_payoffs.maxCoeff() - col_value);
}

namespace detail {

inline void require_finite(const Matrix& m) {
  if (m.size() == 0) throw ArenaError(ErrorCode::kDimensionMismatch, "empty payoff matrix");
  if (!m.allFinite()) throw ArenaError(ErrorCode::kNonFiniteEntry, "payoff matrix has a non-finite entry");
}

// Affine map of payoffs onto [1, 2]; constant matrices map to all ones.
inline Matrix to_positive(const Matrix& m) {
  const double lo = m.minCoeff();
  const double span = m.maxCoeff() - lo;
  const double scale = span > 0.0 ? span : 1.0;
  return ((m.array() - lo) / scale + 1.0).matrix();
}

struct Tableau {
  Matrix table;              // constraint rows x (labels..., rhs)
  std::vector<int> basis;    // label of the basic variable in each row
  int initial_basis_begin;   // labels of the starting slack basis
  int initial_basis_count;
};

inline constexpr double kPivotEpsilon = 1e-12;

// Lexicographic comparison of row r against row s for entering column e,
// keyed by (rhs, inverse-basis columns) / pivot entry.
inline bool lex_less(const Tableau& t, int r, int s, int e) {
  const Eigen::Index rhs = t.table.cols() - 1;
  const double pr = t.table(r, e);
  const double ps = t.table(s, e);
  auto compare = [&](Eigen::Index col) -> int {
    const double a = t.table(r, col) / pr;
    const double b = t.table(s, col) / ps;
    const double tol = 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    if (a < b - tol) return -1;
    if (a > b + tol) return 1;
    return 0;
  };
  if (int c = compare(rhs); c != 0) return c < 0;
  for (int k = 0; k < t.initial_basis_count; ++k) {
    if (int c = compare(t.initial_basis_begin + k); c != 0) return c < 0;
  }
  return r < s;
}

// Brings label `entering` into the basis; returns the label that leaves.
inline int pivot(Tableau& t, int entering) {
  int chosen = -1;
  for (int r = 0; r < t.table.rows(); ++r) {
    if (t.table(r, entering) <= kPivotEpsilon) continue;
    if (chosen < 0 || lex_less(t, r, chosen, entering)) chosen = r;
  }
  if (chosen < 0) {
    throw ArenaError(ErrorCode::kPivotCycleDetected, "no admissible pivot row");
  }
  const double pivot_entry = t.table(chosen, entering);
  t.table.row(chosen) /= pivot_entry;
  for (int r = 0; r < t.table.rows(); ++r) {
    if (r == chosen) continue;
    const double factor = t.table(r, entering);
    if (factor != 0.0) t.table.row(r) -= factor * t.table.row(chosen);
  }
  const int leaving = t.basis[chosen];
  t.basis[chosen] = entering;
  return leaving;
}

inline Vector basic_values(const Tableau& t, int label_begin, int label_count) {
  Vector v = Vector::Zero(label_count);
  const Eigen::Index rhs = t.table.cols() - 1;
  for (int r = 0; r < t.table.rows(); ++r) {
    const int label = t.basis[r];
    if (label >= label_begin && label < label_begin + label_count) {
      v[label - label_begin] = t.table(r, rhs);
    }
  }
  return v;
}

inline std::uint64_t pivot_cap(int labels) {
  return labels < 63 ? (std::uint64_t{1} << labels) : std::numeric_limits<std::uint64_t>::max();
}

}  // namespace detail

// One Nash equilibrium by complementary pivoting from the artificial
// equilibrium, dropping `initial_label` first.
inline GameSolution lemke_howson(const BimatrixGame& game, int initial_label = 0) {
  const int m = game.rows();
  const int n = game.cols();
  const int labels = m + n;
  if (initial_label < 0 || initial_label >= labels) {
    throw ArenaError(ErrorCode::kIndexOutOfRange, "initial label must be below m + n");
  }
  const Matrix a = detail::to_positive(game.payoff_row());
  const Matrix b = detail::to_positive(game.payoff_col());

  detail::Tableau row_tab{Matrix::Zero(n, labels + 1), {}, m, n};
  row_tab.table.leftCols(m) = b.transpose();
  row_tab.table.block(0, m, n, n) = Matrix::Identity(n, n);
  row_tab.table.col(labels).setOnes();
  for (int j = 0; j < n; ++j) row_tab.basis.push_back(m + j);

  detail::Tableau col_tab{Matrix::Zero(m, labels + 1), {}, 0, m};
  col_tab.table.leftCols(m) = Matrix::Identity(m, m);
  col_tab.table.block(0, m, m, n) = a;
  col_tab.table.col(labels).setOnes();
  for (int i = 0; i < m; ++i) col_tab.basis.push_back(i);

  const std::uint64_t cap = detail::pivot_cap(labels);
  std::uint64_t pivots = 0;
  bool in_row_tableau = initial_label < m;
  int entering = initial_label;
  while (true) {
    if (++pivots > cap) {
      throw ArenaError(ErrorCode::kPivotCycleDetected, "pivot count exceeded safety cap");
    }
    const int leaving = detail::pivot(in_row_tableau ? row_tab : col_tab, entering);
    if (leaving == initial_label) break;
    entering = leaving;
    in_row_tableau = !in_row_tableau;
  }

  GameSolution solution;
  solution.strategy_row = MixedStrategy::normalized(detail::basic_values(row_tab, 0, m));
  solution.strategy_col = MixedStrategy::normalized(detail::basic_values(col_tab, m, n));
  solution.value_row = expected_payoff(game.payoff_row(), solution.strategy_row, solution.strategy_col);
  solution.value_col = expected_payoff(game.payoff_col(), solution.strategy_row, solution.strategy_col);
  return solution;
}

// Mixed-strategy value of the zero-sum game where the row player receives
// `payoff` and the column player its negation.
inline GameSolution zero_sum_solve(const Matrix& payoff) {
  detail::require_finite(payoff);
  GameSolution s = lemke_howson(BimatrixGame::zero_sum(payoff), 0);
  s.value_col = -s.value_row;
  return s;
}

// Max over rows of the row minimum; ties to the lowest index.
inline PureMaximin pure_maximin(const Matrix& payoff) {
  detail::require_finite(payoff);
  PureMaximin best;
  best.value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < payoff.rows(); ++i) {
    Eigen::Index j = 0;
    const double row_min = payoff.row(i).minCoeff(&j);
    if (row_min > best.value) best = {i, static_cast<int>(j), row_min};
  }
  return best;
}

namespace detail {

inline void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Solves for a distribution on `support` that makes the opponent indifferent
// across `against`, where payoff(r, c) is the opponent's payoff for
// opponent action r (in `against`) and own action c (in `support`).
inline std::optional<Vector> indifference(const Matrix& payoff, const std::vector<int>& against,
                                          const std::vector<int>& support) {
  const int k = static_cast<int>(support.size());
  Matrix system = Matrix::Zero(k + 1, k + 1);
  Vector rhs = Vector::Zero(k + 1);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) system(r, c) = payoff(against[r], support[c]);
    system(r, k) = -1.0;
  }
  for (int c = 0; c < k; ++c) system(k, c) = 1.0;
  rhs[k] = 1.0;
  Eigen::FullPivLU<Matrix> lu(system);
  if (lu.rank() < k + 1) return std::nullopt;
  Vector sol = lu.solve(rhs);
  if ((system * sol - rhs).cwiseAbs().maxCoeff() > 1e-9) return std::nullopt;
  return sol;
}

}  // namespace detail

// Every equilibrium with equal-size supports (all of them for
// nondegenerate games).
inline std::vector<GameSolution> support_enumeration(const BimatrixGame& game) {
  const int m = game.rows();
  const int n = game.cols();
  if (m > 5 || n > 5) {
    throw ArenaError(ErrorCode::kSizeLimitExceeded, "support enumeration is limited to 5x5 games");
  }
  const Matrix& a = game.payoff_row();
  const Matrix& b = game.payoff_col();
  const Matrix bt = b.transpose();
  std::vector<GameSolution> found;
  for (int k = 1; k <= std::min(m, n); ++k) {
    detail::for_each_subset(m, k, [&](const std::vector<int>& rows) {
      detail::for_each_subset(n, k, [&](const std::vector<int>& cols) {
        // y on cols makes the row player indifferent across rows.
        auto y_sol = detail::indifference(a, rows, cols);
        auto x_sol = detail::indifference(bt, cols, rows);
        if (!y_sol || !x_sol) return;
        Vector x = Vector::Zero(m);
        Vector y = Vector::Zero(n);
        for (int i = 0; i < k; ++i) {
          x[rows[i]] = (*x_sol)[i];
          y[cols[i]] = (*y_sol)[i];
        }
        if (x.minCoeff() < -1e-12 || y.minCoeff() < -1e-12) return;
        GameSolution s{MixedStrategy::normalized(x), MixedStrategy::normalized(y), 0.0, 0.0};
        s.value_row = expected_payoff(a, s.strategy_row, s.strategy_col);
        s.value_col = expected_payoff(b, s.strategy_row, s.strategy_col);
        if (deviation_residual(game, s) > kDeviationTolerance) return;
        for (const auto& prev : found) {
          if ((prev.strategy_row.probabilities - s.strategy_row.probabilities).cwiseAbs().maxCoeff() < 1e-9 &&
              (prev.strategy_col.probabilities - s.strategy_col.probabilities).cwiseAbs().maxCoeff() < 1e-9) {
            return;
          }
        }
        found.push_back(std::move(s));
      });
    });
  }
  return found;
}

}  // namespace arena

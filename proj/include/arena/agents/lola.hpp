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

#include <array>
#include <cmath>
#include <memory>
#include <string>

#include "arena/agents/agent.hpp"

namespace arena {

// Forward-mode dual number. Nesting Dual<Dual<double>> yields mixed second
// derivatives.
template <class T>
struct Dual {
  T v{};
  T d{};
  Dual() = default;
  Dual(double x) : v(x), d(0.0) {}  // NOLINT: implicit constants
  Dual(T value, T derivative) : v(value), d(derivative) {}
};

template <class T> Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T> Dual<T> operator+(const Dual<T>& a, double c) { return {a.v + c, a.d}; }
template <class T> Dual<T> operator+(double c, const Dual<T>& a) { return {c + a.v, a.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, double c) { return {a.v - c, a.d}; }
template <class T> Dual<T> operator-(double c, const Dual<T>& a) { return {c - a.v, -a.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, double c) { return {a.v * c, a.d * c}; }
template <class T> Dual<T> operator*(double c, const Dual<T>& a) { return {c * a.v, c * a.d}; }
template <class T> Dual<T>& operator+=(Dual<T>& a, const Dual<T>& b) { return a = a + b; }

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

template <class T>
Dual<T> sigmoid(const Dual<T>& a) {
  const T s = sigmoid(a.v);
  return {s, a.d * s * (1.0 - s)};
}

inline constexpr int kImpStates = MatchingPennies::kStateDim;
template <class T> using ImpLogits = std::array<T, kImpStates>;

// Row player's exact discounted return in iterated matching pennies,
// divided by the horizon. Logits give the probability of action 0 in each
// of the five states; play starts in the start-token state.
template <class T>
T imp_expected_return(const ImpLogits<T>& row, const ImpLogits<T>& col, int horizon, double gamma) {
  std::array<T, kImpStates> dist;
  for (T& x : dist) x = T(0.0);
  dist[MatchingPennies::kStartToken] = T(1.0);
  T total(0.0);
  double discount = 1.0;
  for (int t = 0; t < horizon; ++t) {
    std::array<T, kImpStates> next;
    for (T& x : next) x = T(0.0);
    for (int s = 0; s < kImpStates; ++s) {
      const T p = sigmoid(row[s]);
      const T q = sigmoid(col[s]);
      total += discount * (dist[s] * ((2.0 * p - 1.0) * (2.0 * q - 1.0)));
      next[0] += dist[s] * (p * q);
      next[1] += dist[s] * (p * (1.0 - q));
      next[2] += dist[s] * ((1.0 - p) * q);
      next[3] += dist[s] * ((1.0 - p) * (1.0 - q));
    }
    dist = next;
    discount *= gamma;
  }
  return total * (1.0 / horizon);
}

// Exact derivatives of the agent's own return: V_own = V_row when playing
// the row, and -V_row with arguments swapped when playing the column.
struct LolaDerivatives {
  double value = 0.0;
  Vector grad_own;           // dV_own / d(own)
  Vector grad_opp;           // dV_own / d(opp)
  Matrix cross;              // d2 V_own / d(own_i) d(opp_j)
};

inline LolaDerivatives lola_derivatives(const Vector& own, const Vector& opp, bool own_is_row, int horizon,
                                        double gamma) {
  using D1 = Dual<double>;
  using D2 = Dual<D1>;
  const double sign = own_is_row ? 1.0 : -1.0;
  auto eval = [&](auto own_t, auto opp_t) {
    return own_is_row ? imp_expected_return(own_t, opp_t, horizon, gamma)
                      : imp_expected_return(opp_t, own_t, horizon, gamma);
  };
  LolaDerivatives out;
  out.grad_own = Vector::Zero(kImpStates);
  out.grad_opp = Vector::Zero(kImpStates);
  out.cross = Matrix::Zero(kImpStates, kImpStates);
  ImpLogits<double> own_d, opp_d;
  for (int s = 0; s < kImpStates; ++s) {
    own_d[s] = own[s];
    opp_d[s] = opp[s];
  }
  out.value = sign * eval(own_d, opp_d);
  for (int k = 0; k < 2 * kImpStates; ++k) {
    ImpLogits<D1> a, b;
    for (int s = 0; s < kImpStates; ++s) {
      a[s] = D1(own[s], k == s ? 1.0 : 0.0);
      b[s] = D1(opp[s], k == kImpStates + s ? 1.0 : 0.0);
    }
    const double g = sign * eval(a, b).d;
    if (k < kImpStates) out.grad_own[k] = g;
    else out.grad_opp[k - kImpStates] = g;
  }
  for (int i = 0; i < kImpStates; ++i) {
    for (int j = 0; j < kImpStates; ++j) {
      ImpLogits<D2> a, b;
      for (int s = 0; s < kImpStates; ++s) {
        a[s] = D2(D1(own[s], 0.0), D1(i == s ? 1.0 : 0.0, 0.0));
        b[s] = D2(D1(opp[s], j == s ? 1.0 : 0.0), D1(0.0, 0.0));
      }
      out.cross(i, j) = sign * eval(a, b).d.d;
    }
  }
  return out;
}

// Ascent direction for the agent's own logits: the naive gradient plus,
// when the opponent's parameters are known, the look-ahead correction
// through one naive step of the opponent. In a zero-sum game the
// opponent's return is -V_own, so its cross-derivative is -cross.
inline Vector lola_direction(const LolaDerivatives& d, double lookahead, bool with_correction) {
  Vector dir = d.grad_own;
  if (with_correction) dir += lookahead * (-d.cross) * d.grad_opp;
  return dir;
}

inline double logit(double p) {
  p = std::clamp(p, 1e-6, 1.0 - 1e-6);
  return std::log(p / (1.0 - p));
}

// Tabular LOLA for iterated matching pennies.
class LolaAgent final : public Agent {
 public:
  LolaAgent(AgentContext ctx, AgentParams params, std::uint64_t seed)
      : Agent(std::move(ctx), std::move(params), seed) {
    if (ctx_.env_id != "imp" || ctx_.state_dim != kImpStates || ctx_.own_actions != 2 || ctx_.opp_actions != 2) {
      throw ArenaError(ErrorCode::kUnsupportedEnvironment, "lola supports only iterated matching pennies");
    }
    logits_ = Vector::Zero(kImpStates);
    opp_counts_ = Matrix::Zero(kImpStates, 2);
  }

  std::string id() const override { return "lola"; }

  int act(const State& s) override {
    return rng_.uniform() < sigmoid(logits_[MatchingPennies::state_index(s)]) ? 0 : 1;
  }

  void observe(const Experience& e) override {
    opp_counts_(MatchingPennies::state_index(e.state), e.opp_action) += 1.0;
    count_transition();
    if (learning_ && transitions_seen_ % params_.lola_update_every == 0) update();
  }

  // One exact LOLA step. Uses the opponent's exposed tabular policy when it
  // has one, and otherwise a smoothed empirical estimate with the naive
  // gradient only.
  void update() {
    const std::optional<Vector> exact = opponent_logits();
    const Vector opp = exact ? *exact : estimated_opponent_logits();
    const LolaDerivatives d =
        lola_derivatives(logits_, opp, ctx_.role == Role::kRow, ctx_.max_steps, ctx_.gamma);
    logits_ += params_.lola_step * lola_direction(d, params_.lola_lookahead, exact.has_value());
  }

  void set_opponent(const Agent* opponent) override { opponent_ = opponent; }

  std::optional<MixedStrategy> tabular_policy(const State& s) const override {
    const double p = sigmoid(logits_[MatchingPennies::state_index(s)]);
    return MixedStrategy(Vector{{p, 1.0 - p}});
  }

  void begin_match(std::uint64_t seed) override {
    Agent::begin_match(seed);
    opp_counts_.setZero();
  }

  Vector& logits() { return logits_; }
  const Vector& logits() const { return logits_; }

  std::unique_ptr<Agent> clone() const override {
    auto copy = std::make_unique<LolaAgent>(*this);
    copy->opponent_ = nullptr;
    return copy;
  }

 private:
  std::optional<Vector> opponent_logits() const {
    if (!opponent_) return std::nullopt;
    Vector out(kImpStates);
    for (int s = 0; s < kImpStates; ++s) {
      const std::optional<MixedStrategy> pi = opponent_->tabular_policy(MatchingPennies::encode(s));
      if (!pi || pi->size() != 2) return std::nullopt;
      out[s] = logit((*pi)[0]);
    }
    return out;
  }

  Vector estimated_opponent_logits() const {
    Vector out(kImpStates);
    for (int s = 0; s < kImpStates; ++s) {
      out[s] = logit((opp_counts_(s, 0) + 1.0) / (opp_counts_(s, 0) + opp_counts_(s, 1) + 2.0));
    }
    return out;
  }

  Vector logits_;
  Matrix opp_counts_;
  const Agent* opponent_ = nullptr;
};

}  // namespace arena

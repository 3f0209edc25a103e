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

#include <algorithm>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "arena/agents/agent.hpp"

namespace arena {

// Euclidean projection onto the probability simplex (sort-based).
inline Vector project_to_simplex(const Vector& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  Vector p = (v.array() - theta).max(0.0).matrix();
  return p / p.sum();
}

// Hill-climbs `pi` toward the greedy action of `q`: +delta on the greedy
// action, -delta/(n-1) on the rest, then projects. The step is delta_win
// when the current policy scores at least as well as the average policy.
// Returns whether the winning step was taken.
inline bool wolf_phc_policy_step(Vector& pi, const Vector& average_pi, const Vector& q, double delta_win,
                                 double delta_lose) {
  const bool winning = pi.dot(q) >= average_pi.dot(q);
  const double delta = winning ? delta_win : delta_lose;
  const int n = static_cast<int>(pi.size());
  const int greedy = argmax_lowest(q);
  Vector moved = pi;
  for (int a = 0; a < n; ++a) moved[a] += a == greedy ? delta : -delta / std::max(1, n - 1);
  pi = project_to_simplex(moved);
  return winning;
}

struct WolfEntry {
  Vector q;
  Vector pi;
  Vector average_pi;
  std::int64_t visits = 0;
};

// Tabular WoLF policy hill climbing. States are keyed by their exact
// coordinates.
class WolfPhcAgent final : public Agent {
 public:
  using Agent::Agent;

  std::string id() const override { return "wolf_phc"; }

  int act(const State& s) override { return rng_.categorical(entry(s).pi); }

  void observe(const Experience& e) override {
    count_transition();
    if (!learning_) return;
    update(e.state, e.own_action, e.reward, e.next_state, e.terminal);
  }

  // Q update, then the running average policy, then the hill-climb step.
  void update(const State& s, int action, double reward, const State& next, bool terminal) {
    const double next_value = terminal ? 0.0 : entry(next).q.maxCoeff();
    WolfEntry& e = entry(s);
    e.q[action] += params_.wolf_alpha * (reward + ctx_.gamma * next_value - e.q[action]);
    ++e.visits;
    e.average_pi += (e.pi - e.average_pi) / static_cast<double>(e.visits);
    wolf_phc_policy_step(e.pi, e.average_pi, e.q, params_.wolf_delta_win, params_.wolf_delta_lose);
  }

  std::optional<MixedStrategy> tabular_policy(const State& s) const override {
    auto it = table_.find(key(s));
    if (it == table_.end()) return MixedStrategy::uniform(ctx_.own_actions);
    return MixedStrategy(it->second.pi);
  }

  const WolfEntry* find(const State& s) const {
    auto it = table_.find(key(s));
    return it == table_.end() ? nullptr : &it->second;
  }

  std::unique_ptr<Agent> clone() const override { return std::make_unique<WolfPhcAgent>(*this); }

 private:
  static std::vector<double> key(const State& s) { return {s.data(), s.data() + s.size()}; }

  WolfEntry& entry(const State& s) {
    auto [it, inserted] = table_.try_emplace(key(s));
    if (inserted) {
      const int n = ctx_.own_actions;
      it->second.q = Vector::Zero(n);
      it->second.pi = Vector::Constant(n, 1.0 / n);
      it->second.average_pi = it->second.pi;
    }
    return it->second;
  }

  std::map<std::vector<double>, WolfEntry> table_;
};

}  // namespace arena

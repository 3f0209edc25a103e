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

#include <memory>
#include <string>
#include <vector>

#include "arena/agents/value_network.hpp"

namespace arena {

// Row player's value of a Q-matrix: the mixed equilibrium value, or the
// pure max-min over action pairs.
inline double matrix_value(const Matrix& q, TargetValue mode) {
  detail::require_finite(q);
  return mode == TargetValue::kMixed ? zero_sum_solve(q).value_row : pure_maximin(q).value;
}

inline double minimax_td_target(double reward, const Matrix& next_q, bool terminal, double gamma,
                                TargetValue mode = TargetValue::kMixed) {
  if (!std::isfinite(reward) || !std::isfinite(gamma)) {
    throw ArenaError(ErrorCode::kNonFiniteEntry, "non-finite reward or discount");
  }
  if (terminal) return reward;
  return reward + gamma * matrix_value(next_q, mode);
}

// Own action for a Q-matrix: sampled from the row equilibrium strategy, or
// the pure max-min row.
inline int minimax_action(const Matrix& q, TargetValue mode, Rng& rng) {
  if (mode == TargetValue::kPure) return pure_maximin(q).row;
  return rng.categorical(zero_sum_solve(q).strategy_row.probabilities);
}

// Agents whose network maps a state to an |own| x |opp| Q-matrix and learn
// from uniform minibatches of single transitions.
class QMatrixAgent : public Agent {
 public:
  QMatrixAgent(AgentContext ctx, AgentParams params, std::uint64_t seed)
      : Agent(std::move(ctx), std::move(params), seed), replay_(static_cast<std::size_t>(params_.replay_capacity)) {
    net_ = TargetedNetwork(dense_spec(ctx_.state_dim, params_.hidden, ctx_.own_actions * ctx_.opp_actions),
                           params_.learning_rate, params_.sync_period, rng_);
  }

  Matrix q_matrix(const State& s) const {
    return nn::as_q_matrix(net_.online().evaluate(s), ctx_.own_actions, ctx_.opp_actions);
  }

  TargetedNetwork& network() { return net_; }
  const TargetedNetwork& network() const { return net_; }
  const ReplayBuffer& replay() const { return replay_; }

  void observe(const Experience& e) override {
    replay_.push(to_transition(e, episode_, step_in_episode_));
    count_transition();
  }

  void begin_match(std::uint64_t seed) override {
    Agent::begin_match(seed);
    replay_.clear();
  }

  std::optional<double> learn() override {
    if (!learn_due() || replay_.size() < static_cast<std::size_t>(params_.batch_size)) return std::nullopt;
    return learn_on(replay_.sample_minibatch(static_cast<std::size_t>(params_.batch_size), rng_));
  }

  // One optimizer step on the given transitions.
  double learn_on(const std::vector<Transition>& batch) {
    const int n = static_cast<int>(batch.size());
    if (n == 0) throw ArenaError(ErrorCode::kInsufficientData, "empty minibatch");
    Matrix inputs(ctx_.state_dim, n);
    Matrix next_inputs(ctx_.state_dim, n);
    std::vector<int> entries(n);
    for (int i = 0; i < n; ++i) {
      inputs.col(i) = batch[i].state;
      next_inputs.col(i) = batch[i].next_state;
      entries[i] = batch[i].action_row * ctx_.opp_actions + batch[i].action_col;
    }
    const std::vector<double> targets = td_targets(batch, next_inputs);
    Vector grad;
    const double loss = squared_entry_loss(net_.online(), inputs, entries, targets, &grad);
    net_.apply(grad);
    after_learn(batch);
    return loss;
  }

 protected:
  std::vector<double> td_targets(const std::vector<Transition>& batch, const Matrix& next_inputs) const {
    const Matrix next_q = net_.target().forward(next_inputs);
    std::vector<double> targets(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const Matrix q = nn::as_q_matrix(next_q.col(static_cast<Eigen::Index>(i)), ctx_.own_actions, ctx_.opp_actions);
      targets[i] = bootstrap_target(batch[i], q);
    }
    return targets;
  }

  virtual double bootstrap_target(const Transition& t, const Matrix& next_q) const = 0;
  virtual void after_learn(const std::vector<Transition>& /*batch*/) {}

  TargetedNetwork net_;
  ReplayBuffer replay_;
};

class MinimaxDqnAgent final : public QMatrixAgent {
 public:
  using QMatrixAgent::QMatrixAgent;

  std::string id() const override { return "minimax_dqn"; }

  int act(const State& s) override {
    if (explore()) return random_action();
    return minimax_action(q_matrix(s), params_.target_value, rng_);
  }

  std::unique_ptr<Agent> clone() const override { return std::make_unique<MinimaxDqnAgent>(*this); }

 protected:
  double bootstrap_target(const Transition& t, const Matrix& next_q) const override {
    return minimax_td_target(t.reward, next_q, t.terminal, ctx_.gamma, params_.target_value);
  }
};

}  // namespace arena

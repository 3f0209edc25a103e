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

inline double q_learning_target(double reward, const Vector& next_q, bool terminal, double gamma) {
  return terminal ? reward : reward + gamma * next_q.maxCoeff();
}

// Single-agent deep Q-learning that treats the opponent as part of the
// environment.
class QLearningAgent final : public Agent {
 public:
  QLearningAgent(AgentContext ctx, AgentParams params, std::uint64_t seed)
      : Agent(std::move(ctx), std::move(params), seed), replay_(static_cast<std::size_t>(params_.replay_capacity)) {
    net_ = TargetedNetwork(dense_spec(ctx_.state_dim, params_.hidden, ctx_.own_actions), params_.learning_rate,
                           params_.sync_period, rng_);
  }

  std::string id() const override { return "qlearn"; }

  Vector q_values(const State& s) const { return net_.online().evaluate(s); }

  int act(const State& s) override {
    if (explore()) return random_action();
    return argmax_lowest(q_values(s));
  }

  void observe(const Experience& e) override {
    replay_.push(to_transition(e, episode_, step_in_episode_));
    count_transition();
  }

  std::optional<double> learn() override {
    if (!learn_due() || replay_.size() < static_cast<std::size_t>(params_.batch_size)) return std::nullopt;
    return learn_on(replay_.sample_minibatch(static_cast<std::size_t>(params_.batch_size), rng_));
  }

  double learn_on(const std::vector<Transition>& batch) {
    const int n = static_cast<int>(batch.size());
    if (n == 0) throw ArenaError(ErrorCode::kInsufficientData, "empty minibatch");
    Matrix inputs(ctx_.state_dim, n), next_inputs(ctx_.state_dim, n);
    std::vector<int> entries(n);
    for (int i = 0; i < n; ++i) {
      inputs.col(i) = batch[i].state;
      next_inputs.col(i) = batch[i].next_state;
      entries[i] = batch[i].action_row;
    }
    const Matrix next_q = net_.target().forward(next_inputs);
    std::vector<double> targets(n);
    for (int i = 0; i < n; ++i) {
      targets[i] = q_learning_target(batch[i].reward, next_q.col(i), batch[i].terminal, ctx_.gamma);
    }
    Vector grad;
    const double loss = squared_entry_loss(net_.online(), inputs, entries, targets, &grad);
    net_.apply(grad);
    return loss;
  }

  void begin_match(std::uint64_t seed) override {
    Agent::begin_match(seed);
    replay_.clear();
  }

  TargetedNetwork& network() { return net_; }

  std::unique_ptr<Agent> clone() const override { return std::make_unique<QLearningAgent>(*this); }

 private:
  TargetedNetwork net_;
  ReplayBuffer replay_;
};

}  // namespace arena

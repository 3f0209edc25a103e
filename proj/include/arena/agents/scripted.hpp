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

#include "arena/agents/agent.hpp"

namespace arena {

// Uniform random play; never learns.
class RandomAgent final : public Agent {
 public:
  using Agent::Agent;
  std::string id() const override { return "random"; }
  int act(const State& /*s*/) override { return random_action(); }
  void observe(const Experience& /*e*/) override { count_transition(); }
  std::optional<MixedStrategy> tabular_policy(const State&) const override {
    return MixedStrategy::uniform(ctx_.own_actions);
  }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<RandomAgent>(*this); }
};

// Samples every action from one fixed mixed strategy, whatever the state.
class StaticAgent final : public Agent {
 public:
  StaticAgent(AgentContext ctx, AgentParams params, std::uint64_t seed)
      : Agent(std::move(ctx), std::move(params), seed) {
    if (params_.static_policy.empty()) {
      policy_ = MixedStrategy::uniform(ctx_.own_actions);
    } else {
      policy_ = MixedStrategy(Eigen::Map<const Vector>(params_.static_policy.data(),
                                                       static_cast<Eigen::Index>(params_.static_policy.size())));
    }
    if (policy_.size() != ctx_.own_actions || !policy_.valid()) {
      throw ArenaError(ErrorCode::kConfigInvalid, "static_policy must be a distribution over the agent's actions");
    }
  }
  std::string id() const override { return "static"; }
  int act(const State& /*s*/) override { return rng_.categorical(policy_.probabilities); }
  void observe(const Experience& /*e*/) override { count_transition(); }
  std::optional<MixedStrategy> tabular_policy(const State&) const override { return policy_; }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<StaticAgent>(*this); }

 private:
  MixedStrategy policy_;
};

}  // namespace arena

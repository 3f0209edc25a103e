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

#include "arena/agents/agent.hpp"
#include "arena/agents/brat.hpp"
#include "arena/agents/lola.hpp"
#include "arena/agents/meta_nash.hpp"
#include "arena/agents/minimax_dqn.hpp"
#include "arena/agents/policy_gradient.hpp"
#include "arena/agents/q_learning.hpp"
#include "arena/agents/scripted.hpp"
#include "arena/agents/wolf_phc.hpp"

namespace arena {

inline const std::vector<std::string>& learner_ids() {
  static const std::vector<std::string> ids = {"minimax_dqn", "brat", "meta_nash", "qlearn", "pg", "wolf_phc", "lola"};
  return ids;
}

// Tabular learners are limited to environments with a small state space.
inline bool agent_supports(const std::string& agent_id, const std::string& env_id) {
  if (agent_id == "lola") return env_id == "imp";
  if (agent_id == "wolf_phc") return env_id == "imp" || env_id == "pp1v1";
  return true;
}

inline std::unique_ptr<Agent> make_agent(const std::string& id, const AgentContext& ctx,
                                         const AgentParams& params, std::uint64_t seed) {
  if (!agent_supports(id, ctx.env_id)) {
    throw ArenaError(ErrorCode::kUnsupportedEnvironment, id + " is not available for " + ctx.env_id);
  }
  if (id == "minimax_dqn") return std::make_unique<MinimaxDqnAgent>(ctx, params, seed);
  if (id == "brat") return std::make_unique<BratAgent>(ctx, params, seed);
  if (id == "meta_nash") return std::make_unique<MetaNashAgent>(ctx, params, seed);
  if (id == "qlearn") return std::make_unique<QLearningAgent>(ctx, params, seed);
  if (id == "pg") return std::make_unique<PolicyGradientAgent>(ctx, params, seed);
  if (id == "wolf_phc") return std::make_unique<WolfPhcAgent>(ctx, params, seed);
  if (id == "lola") return std::make_unique<LolaAgent>(ctx, params, seed);
  if (id == "random") return std::make_unique<RandomAgent>(ctx, params, seed);
  if (id == "static") return std::make_unique<StaticAgent>(ctx, params, seed);
  throw ArenaError(ErrorCode::kConfigInvalid, "unknown agent id: " + id);
}

}  // namespace arena

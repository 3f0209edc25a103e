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

// Agent contract shared by every learner. Agents always see the game from
// their own side: own action first, own reward, and Q-matrices whose rows
// are the agent's actions and whose columns are the opponent's.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arena/common.hpp"
#include "arena/environments.hpp"
#include "arena/matrix_game.hpp"
#include "json.hpp"

namespace arena {

enum class Role { kRow, kCol };

inline std::string_view role_name(Role r) { return r == Role::kRow ? "row" : "col"; }

// How the value of a next-state Q-matrix is taken.
enum class TargetValue { kMixed, kPure };
// BRAT's bootstrap: expected value under the opponent model, or max-min.
enum class BratTarget { kGreedy, kMinimax };

struct AgentParams {
  double learning_rate = 0.005;
  std::vector<int> hidden = {64, 64};
  int context_dim = 32;
  int replay_capacity = 10000;
  int batch_size = 32;
  int learn_every = 4;
  int sync_period = 100;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int epsilon_anneal = 1000;
  TargetValue target_value = TargetValue::kMixed;
  BratTarget brat_target = BratTarget::kMinimax;
  int opponent_window = 256;
  int gru_length = 8;
  int chunk_batch = 4;
  double wolf_alpha = 0.1;
  double wolf_delta_win = 0.01;
  double wolf_delta_lose = 0.04;
  double lola_step = 0.1;
  double lola_lookahead = 0.3;
  int lola_update_every = 10;
  bool pg_baseline = true;
  std::vector<double> static_policy;  // scripted "static" agent only

  // Overlays the keys present in `j`; unknown keys are rejected.
  static AgentParams from_json(const nlohmann::json& j) { return from_json(j, AgentParams()); }

  static AgentParams from_json(const nlohmann::json& j, AgentParams base) {
    if (!j.is_object()) throw ArenaError(ErrorCode::kConfigInvalid, "agent parameters must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const nlohmann::json& v = it.value();
      try {
        if (k == "learning_rate" || k == "lr") base.learning_rate = v.get<double>();
        else if (k == "hidden") base.hidden = v.get<std::vector<int>>();
        else if (k == "context_dim") base.context_dim = v.get<int>();
        else if (k == "replay_capacity") base.replay_capacity = v.get<int>();
        else if (k == "batch_size") base.batch_size = v.get<int>();
        else if (k == "learn_every") base.learn_every = v.get<int>();
        else if (k == "sync_period") base.sync_period = v.get<int>();
        else if (k == "epsilon_start") base.epsilon_start = v.get<double>();
        else if (k == "epsilon_end") base.epsilon_end = v.get<double>();
        else if (k == "epsilon_anneal") base.epsilon_anneal = v.get<int>();
        else if (k == "target_value") base.target_value = parse_target_value(v.get<std::string>());
        else if (k == "brat_target") base.brat_target = parse_brat_target(v.get<std::string>());
        else if (k == "opponent_window") base.opponent_window = v.get<int>();
        else if (k == "gru_length") base.gru_length = v.get<int>();
        else if (k == "chunk_batch") base.chunk_batch = v.get<int>();
        else if (k == "wolf_alpha") base.wolf_alpha = v.get<double>();
        else if (k == "wolf_delta_win") base.wolf_delta_win = v.get<double>();
        else if (k == "wolf_delta_lose") base.wolf_delta_lose = v.get<double>();
        else if (k == "lola_step") base.lola_step = v.get<double>();
        else if (k == "lola_lookahead") base.lola_lookahead = v.get<double>();
        else if (k == "lola_update_every") base.lola_update_every = v.get<int>();
        else if (k == "pg_baseline") base.pg_baseline = v.get<bool>();
        else if (k == "static_policy") base.static_policy = v.get<std::vector<double>>();
        else throw ArenaError(ErrorCode::kConfigInvalid, "unknown agent parameter: " + k);
      } catch (const nlohmann::json::exception& e) {
        throw ArenaError(ErrorCode::kConfigInvalid, "bad value for " + k + ": " + e.what());
      }
    }
    base.validate();
    return base;
  }

  nlohmann::json to_json() const {
    return {{"learning_rate", learning_rate}, {"hidden", hidden}, {"context_dim", context_dim},
            {"replay_capacity", replay_capacity}, {"batch_size", batch_size}, {"learn_every", learn_every},
            {"sync_period", sync_period}, {"epsilon_start", epsilon_start}, {"epsilon_end", epsilon_end},
            {"epsilon_anneal", epsilon_anneal},
            {"target_value", target_value == TargetValue::kMixed ? "mixed" : "pure"},
            {"brat_target", brat_target == BratTarget::kMinimax ? "minimax" : "greedy"},
            {"opponent_window", opponent_window}, {"gru_length", gru_length}, {"chunk_batch", chunk_batch},
            {"wolf_alpha", wolf_alpha}, {"wolf_delta_win", wolf_delta_win}, {"wolf_delta_lose", wolf_delta_lose},
            {"lola_step", lola_step}, {"lola_lookahead", lola_lookahead},
            {"lola_update_every", lola_update_every}, {"pg_baseline", pg_baseline}};
  }

  void validate() const {
    auto positive = [](int v, const char* name) {
      if (v < 1) throw ArenaError(ErrorCode::kConfigInvalid, std::string(name) + " must be positive");
    };
    positive(context_dim, "context_dim");
    positive(replay_capacity, "replay_capacity");
    positive(batch_size, "batch_size");
    positive(learn_every, "learn_every");
    positive(sync_period, "sync_period");
    positive(opponent_window, "opponent_window");
    positive(gru_length, "gru_length");
    positive(chunk_batch, "chunk_batch");
    positive(lola_update_every, "lola_update_every");
    for (int h : hidden) positive(h, "hidden width");
    if (!(learning_rate > 0.0)) throw ArenaError(ErrorCode::kConfigInvalid, "learning_rate must be positive");
    if (epsilon_start < 0 || epsilon_start > 1 || epsilon_end < 0 || epsilon_end > 1 || epsilon_anneal < 0) {
      throw ArenaError(ErrorCode::kConfigInvalid, "exploration schedule out of range");
    }
  }

  static TargetValue parse_target_value(const std::string& s) {
    if (s == "mixed") return TargetValue::kMixed;
    if (s == "pure") return TargetValue::kPure;
    throw ArenaError(ErrorCode::kConfigInvalid, "target_value must be mixed or pure");
  }

  static BratTarget parse_brat_target(const std::string& s) {
    if (s == "minimax") return BratTarget::kMinimax;
    if (s == "greedy") return BratTarget::kGreedy;
    throw ArenaError(ErrorCode::kConfigInvalid, "brat_target must be minimax or greedy");
  }
};

struct AgentContext {
  std::string env_id;
  Role role = Role::kRow;
  int state_dim = 1;
  int own_actions = 1;
  int opp_actions = 1;
  int max_steps = 100;
  double gamma = 1.0;

  static AgentContext for_env(const Environment& env, Role role) {
    const EnvSpec spec = env.spec();
    AgentContext ctx;
    ctx.env_id = env.id();
    ctx.role = role;
    ctx.state_dim = spec.state_dim;
    ctx.own_actions = role == Role::kRow ? spec.actions_row : spec.actions_col;
    ctx.opp_actions = role == Role::kRow ? spec.actions_col : spec.actions_row;
    ctx.max_steps = spec.max_steps;
    ctx.gamma = spec.discount;
    return ctx;
  }
};

// One step seen from the observing agent's side.
struct Experience {
  State state;
  int own_action = 0;
  int opp_action = 0;
  double reward = 0.0;
  State next_state;
  bool terminal = false;
};

class Agent {
 public:
  Agent(AgentContext ctx, AgentParams params, std::uint64_t seed)
      : ctx_(std::move(ctx)), params_(std::move(params)), rng_(seed) {
    params_.validate();
  }
  virtual ~Agent() = default;

  virtual std::string id() const = 0;
  virtual int act(const State& state) = 0;
  virtual void observe(const Experience& e) = 0;
  // One update when the agent's cadence calls for it; the loss if one ran.
  virtual std::optional<double> learn() { return std::nullopt; }
  virtual void episode_reset() {
    ++episode_;
    step_in_episode_ = 0;
  }
  virtual std::unique_ptr<Agent> clone() const = 0;

  // Starts a match with the current parameters: reseeds, restarts the
  // exploration schedule and drops per-match experience.
  virtual void begin_match(std::uint64_t seed) {
    rng_.reseed(seed);
    transitions_seen_ = 0;
    episode_ = 0;
    step_in_episode_ = 0;
  }

  // Opponent access for agents that use the opponent's policy parameters.
  virtual void set_opponent(const Agent* /*opponent*/) {}
  // Exposed per-state policy for tabular agents.
  virtual std::optional<MixedStrategy> tabular_policy(const State& /*state*/) const { return std::nullopt; }

  const AgentContext& context() const { return ctx_; }
  const AgentParams& params() const { return params_; }

  void set_learning_enabled(bool enabled) { learning_ = enabled; }
  bool learning_enabled() const { return learning_; }
  void set_epsilon_override(std::optional<double> eps) { epsilon_override_ = eps; }

  // Linear anneal from epsilon_start to epsilon_end over the first
  // epsilon_anneal transitions of the match.
  double epsilon() const {
    if (epsilon_override_) return *epsilon_override_;
    if (params_.epsilon_anneal == 0 || transitions_seen_ >= params_.epsilon_anneal) return params_.epsilon_end;
    const double frac = static_cast<double>(transitions_seen_) / params_.epsilon_anneal;
    return params_.epsilon_start + frac * (params_.epsilon_end - params_.epsilon_start);
  }

  std::int64_t transitions_seen() const { return transitions_seen_; }

 protected:
  void count_transition() {
    ++transitions_seen_;
    ++step_in_episode_;
  }

  bool explore() { return rng_.bernoulli(epsilon()); }
  int random_action() { return rng_.index(ctx_.own_actions); }

  bool learn_due() const {
    return learning_ && transitions_seen_ > 0 && transitions_seen_ % params_.learn_every == 0;
  }

  AgentContext ctx_;
  AgentParams params_;
  Rng rng_;
  std::int64_t transitions_seen_ = 0;
  std::int64_t episode_ = 0;
  int step_in_episode_ = 0;
  bool learning_ = true;
  std::optional<double> epsilon_override_;
};

inline Vector one_hot(int index, int size) {
  Vector v = Vector::Zero(size);
  v[index] = 1.0;
  return v;
}

inline Matrix stack_columns(const std::vector<State>& columns) {
  Matrix m(columns.front().size(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) m.col(static_cast<Eigen::Index>(c)) = columns[c];
  return m;
}

}  // namespace arena

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
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "arena/agents.hpp"
#include "arena/environments.hpp"
#include "json.hpp"

namespace arena {

struct TournamentConfig {
  std::string env_id = "imp";
  std::vector<std::string> agent_ids;
  int trials = 25;
  int episodes = 50;
  int max_transitions = 100;
  int pretrain_episodes = 0;
  std::uint64_t seed = 7;
  double gamma = 1.0;
  bool swap_sides = false;
  // Keyed by agent id; "*" applies to every agent before its own entry.
  std::map<std::string, nlohmann::json> agent_overrides;

  static TournamentConfig defaults_for(const std::string& env_id) {
    TournamentConfig c;
    c.env_id = env_id;
    if (env_id != "imp") {
      c.episodes = 200;
      c.pretrain_episodes = 50;
    }
    c.gamma = default_discount(env_id);
    return c;
  }

  void validate() const {
    auto fail = [](const std::string& why) { throw ArenaError(ErrorCode::kConfigInvalid, why); };
    if (env_id != "imp" && env_id != "pp1v1" && env_id != "pp3v1") fail("unknown environment id: " + env_id);
    if (trials < 1) fail("trials must be at least 1");
    if (episodes < 1) fail("episodes must be at least 1");
    if (max_transitions < 1) fail("transitions must be at least 1");
    if (pretrain_episodes < 0) fail("pretrain episodes must be non-negative");
    if (gamma < 0.0 || gamma > 1.0) fail("gamma must lie in [0, 1]");
    if (agent_ids.size() < 2) fail("a tournament needs at least two agents");
    const std::set<std::string> unique(agent_ids.begin(), agent_ids.end());
    if (unique.size() != agent_ids.size()) fail("agent ids must be distinct");
    for (const std::string& id : agent_ids) {
      if (!agent_supports(id, env_id)) fail(id + " is not available for " + env_id);
    }
    for (const std::string& id : agent_ids) params_for(id);
  }

  AgentParams params_for(const std::string& agent_id) const {
    AgentParams p;
    if (auto it = agent_overrides.find("*"); it != agent_overrides.end()) p = AgentParams::from_json(it->second, p);
    if (auto it = agent_overrides.find(agent_id); it != agent_overrides.end()) p = AgentParams::from_json(it->second, p);
    return p;
  }

  // Unordered pairs in list order; first is the row agent.
  std::vector<std::pair<std::string, std::string>> pairs() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < agent_ids.size(); ++i) {
      for (std::size_t j = i + 1; j < agent_ids.size(); ++j) {
        std::string row = std::min(agent_ids[i], agent_ids[j]);
        std::string col = std::max(agent_ids[i], agent_ids[j]);
        if (swap_sides) std::swap(row, col);
        out.emplace_back(std::move(row), std::move(col));
      }
    }
    return out;
  }

  int match_count() const { return trials * static_cast<int>(pairs().size()); }

  nlohmann::json to_json() const {
    nlohmann::json overrides = nlohmann::json::object();
    for (const auto& [k, v] : agent_overrides) overrides[k] = v;
    return {{"env", env_id}, {"agents", agent_ids}, {"trials", trials}, {"episodes", episodes},
            {"transitions", max_transitions}, {"pretrain", pretrain_episodes}, {"seed", seed},
            {"gamma", gamma}, {"swap_sides", swap_sides}, {"agent_params", overrides}};
  }

  // Fields absent from `j` keep the environment defaults.
  static TournamentConfig from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ArenaError(ErrorCode::kConfigInvalid, "config must be a JSON object");
    TournamentConfig c = defaults_for(j.value("env", std::string("imp")));
    try {
      for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const nlohmann::json& v = it.value();
        if (k == "env") continue;
        if (k == "agents") c.agent_ids = v.get<std::vector<std::string>>();
        else if (k == "trials") c.trials = v.get<int>();
        else if (k == "episodes") c.episodes = v.get<int>();
        else if (k == "transitions") c.max_transitions = v.get<int>();
        else if (k == "pretrain") c.pretrain_episodes = v.get<int>();
        else if (k == "seed") c.seed = v.get<std::uint64_t>();
        else if (k == "gamma") c.gamma = v.get<double>();
        else if (k == "swap_sides") c.swap_sides = v.get<bool>();
        else if (k == "agent_params") {
          for (auto a = v.begin(); a != v.end(); ++a) c.agent_overrides[a.key()] = a.value();
        } else if (k == "threads" || k == "out" || k == "agent") {
          // CLI-level keys, read by the front end.
        } else {
          throw ArenaError(ErrorCode::kConfigInvalid, "unknown config key: " + k);
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw ArenaError(ErrorCode::kConfigInvalid, std::string("bad config value: ") + e.what());
    }
    return c;
  }
};

struct MatchRecord {
  int trial = 0;
  std::string agent_row;
  std::string agent_col;
  int episode = 0;
  double reward_row_total = 0.0;
  int transitions = 0;

  bool operator==(const MatchRecord&) const = default;
};

struct StepEvent {
  int episode = 0;
  int step = 0;
  int action_row = 0;
  int action_col = 0;
  double reward_row = 0.0;
  double reward_col = 0.0;
};

using StepHook = std::function<void(const StepEvent&)>;

// Plays `episodes` consecutive episodes; both agents act on the same state
// each transition and keep learning across episodes.
inline std::vector<MatchRecord> run_match(Environment& env, Agent& row, Agent& col, int episodes,
                                          std::uint64_t seed, int trial = 0, const StepHook& hook = {}) {
  row.begin_match(derive_seed(seed, {0}));
  col.begin_match(derive_seed(seed, {1}));
  row.set_opponent(&col);
  col.set_opponent(&row);
  std::vector<MatchRecord> records;
  records.reserve(static_cast<std::size_t>(episodes));
  for (int e = 0; e < episodes; ++e) {
    State s = env.reset(derive_seed(seed, {2, static_cast<std::uint64_t>(e)}));
    row.episode_reset();
    col.episode_reset();
    MatchRecord rec{trial, row.id(), col.id(), e, 0.0, 0};
    for (bool done = false; !done;) {
      const int a = row.act(s);
      const int b = col.act(s);
      const StepResult r = env.step(a, b);
      row.observe({s, a, b, r.reward_row, r.next_state, r.terminal});
      col.observe({s, b, a, r.reward_col(), r.next_state, r.terminal});
      row.learn();
      col.learn();
      if (hook) hook({e, rec.transitions, a, b, r.reward_row, r.reward_col()});
      rec.reward_row_total += r.reward_row;
      ++rec.transitions;
      s = r.next_state;
      done = r.terminal;
    }
    records.push_back(std::move(rec));
  }
  row.set_opponent(nullptr);
  col.set_opponent(nullptr);
  return records;
}

// Runs fn(0..n-1) on up to `threads` workers (0 or 1 runs inline). Each
// index is claimed by exactly one worker.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min(threads, n); ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ARENA_THREADS, or 0 (serial) when unset or malformed.
inline int threads_from_environment() {
  const char* v = std::getenv("ARENA_THREADS");
  if (!v || !*v) return 0;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 0) return 0;
  return static_cast<int>(std::min<long>(n, 1024));
}

// One parameter set per (agent, side). Network shapes depend on the side in
// predator-prey, so the row and column instances are distinct.
struct AgentRoster {
  std::map<std::pair<std::string, Role>, std::unique_ptr<Agent>> agents;

  Agent& at(const std::string& id, Role role) { return *agents.at({id, role}); }
};

inline AgentRoster fresh_roster(const TournamentConfig& c, const Environment& env, int trial) {
  AgentRoster roster;
  for (std::size_t i = 0; i < c.agent_ids.size(); ++i) {
    for (Role role : {Role::kRow, Role::kCol}) {
      const std::uint64_t seed =
          derive_seed(c.seed, {static_cast<std::uint64_t>(trial), 1000 + i, role == Role::kRow ? 0u : 1u});
      roster.agents[{c.agent_ids[i], role}] =
          make_agent(c.agent_ids[i], AgentContext::for_env(env, role), c.params_for(c.agent_ids[i]), seed);
    }
  }
  return roster;
}

// Every pair plays `episodes` unrecorded episodes on the shared instances.
inline void pretrain_phase(const TournamentConfig& c, Environment& env, AgentRoster& roster, int trial) {
  if (c.pretrain_episodes == 0) return;
  const auto pairs = c.pairs();
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    run_match(env, roster.at(pairs[p].first, Role::kRow), roster.at(pairs[p].second, Role::kCol),
              c.pretrain_episodes, derive_seed(c.seed, {static_cast<std::uint64_t>(trial), p, 0xBEEFu}), trial);
  }
}

struct TournamentResults {
  TournamentConfig config;
  std::vector<MatchRecord> records;
  int matches = 0;
};

inline TournamentResults run_round_robin(const TournamentConfig& c, int threads = 0, const StepHook& hook = {}) {
  c.validate();
  const auto pairs = c.pairs();
  const int pair_count = static_cast<int>(pairs.size());
  auto env = make_environment(c.env_id, c.max_transitions, c.gamma);

  std::vector<AgentRoster> snapshots(static_cast<std::size_t>(c.trials));
  parallel_for(c.trials, threads, [&](int t) {
    auto local_env = env->clone();
    snapshots[static_cast<std::size_t>(t)] = fresh_roster(c, *local_env, t);
    pretrain_phase(c, *local_env, snapshots[static_cast<std::size_t>(t)], t);
  });

  const int cells = c.trials * pair_count;
  std::vector<std::vector<MatchRecord>> per_cell(static_cast<std::size_t>(cells));
  parallel_for(cells, threads, [&](int cell) {
    const int t = cell / pair_count;
    const int p = cell % pair_count;
    auto local_env = env->clone();
    AgentRoster& roster = snapshots[static_cast<std::size_t>(t)];
    std::unique_ptr<Agent> row = roster.at(pairs[p].first, Role::kRow).clone();
    std::unique_ptr<Agent> col = roster.at(pairs[p].second, Role::kCol).clone();
    per_cell[static_cast<std::size_t>(cell)] =
        run_match(*local_env, *row, *col, c.episodes,
                  derive_seed(c.seed, {static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(p)}), t, hook);
  });

  TournamentResults out;
  out.config = c;
  out.matches = cells;
  for (auto& cell : per_cell) {
    for (MatchRecord& r : cell) out.records.push_back(std::move(r));
  }
  return out;
}

struct AgentSeries {
  std::vector<double> episode_sum;
  std::vector<double> episode_mean;
  std::vector<int> samples;
  double cumulative = 0.0;

  bool operator==(const AgentSeries&) const = default;
};

struct AggregateStats {
  std::vector<std::string> agents;
  int episodes = 0;
  std::map<std::string, AgentSeries> series;

  bool operator==(const AggregateStats&) const = default;
};

// Per-episode means over every (opponent, trial) sample from each agent's
// own side; cumulative is the sum of those means over episodes.
inline AggregateStats aggregate(const std::vector<MatchRecord>& records, const std::vector<std::string>& agents,
                                int trials, int episodes) {
  AggregateStats stats;
  stats.agents = agents;
  stats.episodes = episodes;
  for (const std::string& a : agents) {
    stats.series[a] = {std::vector<double>(episodes, 0.0), std::vector<double>(episodes, 0.0),
                       std::vector<int>(episodes, 0), 0.0};
  }
  for (const MatchRecord& r : records) {
    if (r.episode < 0 || r.episode >= episodes || !stats.series.count(r.agent_row) ||
        !stats.series.count(r.agent_col)) {
      throw ArenaError(ErrorCode::kMissingRecords, "record outside the configured grid");
    }
    AgentSeries& row = stats.series[r.agent_row];
    AgentSeries& col = stats.series[r.agent_col];
    row.episode_sum[r.episode] += r.reward_row_total;
    col.episode_sum[r.episode] += -r.reward_row_total;
    ++row.samples[r.episode];
    ++col.samples[r.episode];
  }
  const int expected = (static_cast<int>(agents.size()) - 1) * trials;
  for (auto& [name, s] : stats.series) {
    for (int e = 0; e < episodes; ++e) {
      if (s.samples[e] != expected) {
        throw ArenaError(ErrorCode::kMissingRecords,
                         name + " has " + std::to_string(s.samples[e]) + " samples in episode " + std::to_string(e) +
                             ", expected " + std::to_string(expected));
      }
      s.episode_mean[e] = s.episode_sum[e] / s.samples[e];
      s.cumulative += s.episode_mean[e];
    }
  }
  return stats;
}

inline AggregateStats aggregate(const TournamentResults& r) {
  return aggregate(r.records, r.config.agent_ids, r.config.trials, r.config.episodes);
}

inline nlohmann::json to_json(const AggregateStats& s) {
  nlohmann::json agents = nlohmann::json::object();
  for (const auto& [name, series] : s.series) {
    agents[name] = {{"episode_mean", series.episode_mean}, {"samples", series.samples},
                    {"cumulative", series.cumulative}};
  }
  return {{"episodes", s.episodes}, {"agents", agents}};
}

}  // namespace arena

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

// Command-line front end: tournaments, self-play, plotting and matrix-game
// solving.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "arena/agents.hpp"
#include "arena/matrix_game.hpp"
#include "arena/report.hpp"
#include "arena/tournament.hpp"

namespace {

using arena::ArenaError;
using arena::ErrorCode;
using nlohmann::json;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArenaError(ErrorCode::kIoFailure, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ArenaError(ErrorCode::kConfigInvalid, path + ": " + e.what());
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Values given on the command line; each one replaces the matching config
// file key.
struct Flags {
  std::string config;
  std::string env;
  std::string agents;
  std::string agent;
  int trials = 0;
  int episodes = 0;
  int transitions = 0;
  int pretrain = 0;
  std::uint64_t seed = 0;
  double gamma = 0.0;
  bool swap_sides = false;
  std::string out;
  int window = 10;
};

struct FlagOptions {
  CLI::Option* env = nullptr;
  CLI::Option* agents = nullptr;
  CLI::Option* agent = nullptr;
  CLI::Option* trials = nullptr;
  CLI::Option* episodes = nullptr;
  CLI::Option* transitions = nullptr;
  CLI::Option* pretrain = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* gamma = nullptr;
  CLI::Option* swap_sides = nullptr;
  CLI::Option* out = nullptr;
};

FlagOptions add_common(CLI::App* cmd, Flags& f) {
  FlagOptions o;
  cmd->add_option("--config", f.config, "JSON config file; flags override its keys")->check(CLI::ExistingFile);
  o.env = cmd->add_option("--env", f.env, "environment: imp, pp1v1 or pp3v1");
  o.trials = cmd->add_option("--trials", f.trials, "independent trials");
  o.episodes = cmd->add_option("--episodes", f.episodes, "episodes per match");
  o.transitions = cmd->add_option("--transitions", f.transitions, "transitions per episode");
  o.seed = cmd->add_option("--seed", f.seed, "base seed");
  o.gamma = cmd->add_option("--gamma", f.gamma, "discount factor");
  o.out = cmd->add_option("--out", f.out, "output directory");
  return o;
}

// Merges the config file with the flags that were given explicitly.
json merged_config(const Flags& f, const FlagOptions& o) {
  json j = f.config.empty() ? json::object() : read_json(f.config);
  if (!j.is_object()) throw ArenaError(ErrorCode::kConfigInvalid, "config must be a JSON object");
  auto set = [&](CLI::Option* opt, const char* key, const json& value) {
    if (opt != nullptr && opt->count() > 0) j[key] = value;
  };
  set(o.env, "env", f.env);
  set(o.agents, "agents", split_list(f.agents));
  set(o.agent, "agent", f.agent);
  set(o.trials, "trials", f.trials);
  set(o.episodes, "episodes", f.episodes);
  set(o.transitions, "transitions", f.transitions);
  set(o.pretrain, "pretrain", f.pretrain);
  set(o.seed, "seed", f.seed);
  set(o.gamma, "gamma", f.gamma);
  set(o.swap_sides, "swap_sides", f.swap_sides);
  set(o.out, "out", f.out);
  return j;
}

// ARENA_THREADS wins over the config file's "threads" key.
int thread_count(const json& j) {
  if (std::getenv("ARENA_THREADS") != nullptr) return arena::threads_from_environment();
  return j.value("threads", 0);
}

int cmd_run(const Flags& f, const FlagOptions& o) {
  const json j = merged_config(f, o);
  arena::TournamentConfig c = arena::TournamentConfig::from_json(j);
  c.validate();
  const std::string out = j.value("out", std::string("results"));
  const int threads = thread_count(j);
  std::fprintf(stderr, "arena: %d matches on %s, %d thread(s)\n", c.match_count(), c.env_id.c_str(), threads);
  const arena::TournamentResults results = arena::run_round_robin(c, threads);
  const arena::AggregateStats stats = arena::persist(results, out);
  std::printf("%-12s %14s\n", "agent", "cumulative");
  for (const std::string& id : c.agent_ids) std::printf("%-12s %14.4f\n", id.c_str(), stats.series.at(id).cumulative);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int cmd_selfplay(const Flags& f, const FlagOptions& o) {
  json j = merged_config(f, o);
  if (!j.contains("agent")) throw ArenaError(ErrorCode::kConfigInvalid, "selfplay needs --agent");
  const std::string agent_id = j.at("agent").get<std::string>();
  arena::TournamentConfig c = arena::TournamentConfig::from_json(j);
  if (!arena::agent_supports(agent_id, c.env_id)) {
    throw ArenaError(ErrorCode::kUnsupportedEnvironment, agent_id + " is not available for " + c.env_id);
  }
  if (c.trials < 1 || c.episodes < 1 || c.max_transitions < 1) {
    throw ArenaError(ErrorCode::kConfigInvalid, "trials, episodes and transitions must be positive");
  }
  const int window = std::min(f.window, c.episodes);
  const arena::AgentParams params = c.params_for(agent_id);
  auto env = arena::make_environment(c.env_id, c.max_transitions, c.gamma);

  json trials = json::array();
  double mean = 0.0;
  std::printf("%-6s %12s %10s %10s\n", "trial", "reward/step", "row a0", "col a0");
  for (int t = 0; t < c.trials; ++t) {
    const auto trial = static_cast<std::uint64_t>(t);
    auto row = arena::make_agent(agent_id, arena::AgentContext::for_env(*env, arena::Role::kRow), params,
                                 arena::derive_seed(c.seed, {trial, 0}));
    auto col = arena::make_agent(agent_id, arena::AgentContext::for_env(*env, arena::Role::kCol), params,
                                 arena::derive_seed(c.seed, {trial, 1}));
    double reward = 0.0;
    long steps = 0, row0 = 0, col0 = 0;
    arena::run_match(*env, *row, *col, c.episodes, arena::derive_seed(c.seed, {trial}), t,
                     [&](const arena::StepEvent& e) {
                       if (e.episode < c.episodes - window) return;
                       reward += e.reward_row;
                       ++steps;
                       row0 += e.action_row == 0;
                       col0 += e.action_col == 0;
                     });
    const double n = static_cast<double>(steps);
    trials.push_back({{"trial", t}, {"reward_per_step", reward / n}, {"row_action0", row0 / n},
                      {"col_action0", col0 / n}});
    mean += reward / n / c.trials;
    std::printf("%-6d %+12.4f %10.3f %10.3f\n", t, reward / n, row0 / n, col0 / n);
  }
  std::printf("mean reward per step over the last %d episodes: %+.4f\n", window, mean);
  if (j.contains("out")) {
    const std::filesystem::path out = j.at("out").get<std::string>();
    std::filesystem::create_directories(out);
    json doc = {{"agent", agent_id}, {"env", c.env_id}, {"episodes", c.episodes}, {"window", window},
                {"seed", c.seed}, {"mean_reward_per_step", mean}, {"trials", trials}};
    arena::write_text(out / "selfplay.json", doc.dump(2) + "\n");
    std::printf("wrote %s\n", out.string().c_str());
  }
  return 0;
}

int cmd_plot(const std::string& in, const std::string& out) {
  const arena::AggregateStats stats = arena::load_stats(in);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw ArenaError(ErrorCode::kIoFailure, "cannot create " + out);
  arena::emit_plots(stats, out);
  std::printf("wrote %s/reward_line.svg and %s/reward_bar.svg\n", out.c_str(), out.c_str());
  return 0;
}

arena::Matrix read_matrix(const json& j, const char* key) {
  try {
    const auto rows = j.at(key).get<std::vector<std::vector<double>>>();
    if (rows.empty() || rows.front().empty()) throw ArenaError(ErrorCode::kDimensionMismatch, "empty payoff matrix");
    arena::Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows.front().size()) throw ArenaError(ErrorCode::kDimensionMismatch, "ragged matrix");
      for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    }
    return m;
  } catch (const json::exception& e) {
    throw ArenaError(ErrorCode::kConfigInvalid, std::string(key) + ": " + e.what());
  }
}

json to_json(const arena::GameSolution& s, const arena::BimatrixGame& g) {
  auto vec = [](const arena::Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return {{"strategy_row", vec(s.strategy_row.probabilities)},
          {"strategy_col", vec(s.strategy_col.probabilities)},
          {"value_row", s.value_row},
          {"value_col", s.value_col},
          {"residual", arena::deviation_residual(g, s)}};
}

int cmd_solve(const std::string& path, bool all) {
  const json j = read_json(path);
  const arena::Matrix row = read_matrix(j, "payoff_row");
  const arena::Matrix col = j.contains("payoff_col") ? read_matrix(j, "payoff_col") : arena::Matrix(-row);
  const arena::BimatrixGame game(row, col);
  json out = {{"lemke_howson", to_json(arena::lemke_howson(game), game)}};
  if (all) {
    json list = json::array();
    for (const arena::GameSolution& s : arena::support_enumeration(game)) list.push_back(to_json(s, game));
    out["support_enumeration"] = list;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-player zero-sum Markov game arena"};
  app.require_subcommand(1);

  Flags run_flags;
  CLI::App* run = app.add_subcommand("run", "round-robin tournament");
  FlagOptions run_opts = add_common(run, run_flags);
  run_opts.agents = run->add_option("--agents", run_flags.agents, "comma-separated agent ids");
  run_opts.pretrain = run->add_option("--pretrain", run_flags.pretrain, "pretraining episodes per pair");
  run_opts.swap_sides = run->add_flag("--swap-sides", run_flags.swap_sides, "give the row to the larger id");

  Flags self_flags;
  CLI::App* selfplay = app.add_subcommand("selfplay", "an agent against a copy of itself");
  FlagOptions self_opts = add_common(selfplay, self_flags);
  self_opts.agent = selfplay->add_option("--agent", self_flags.agent, "agent id");
  selfplay->add_option("--window", self_flags.window, "trailing episodes to score")->check(CLI::PositiveNumber);

  std::string plot_in, plot_out;
  CLI::App* plot = app.add_subcommand("plot", "redraw figures from a results directory");
  plot->add_option("--in", plot_in, "results directory")->required();
  plot->add_option("--out", plot_out, "figure directory")->required();

  std::string game_path;
  bool all_equilibria = false;
  CLI::App* solve = app.add_subcommand("solve", "Nash equilibrium of a bimatrix game");
  solve->add_option("--game", game_path, "JSON with payoff_row and optional payoff_col")->required();
  solve->add_flag("--all", all_equilibria, "also list every equilibrium found by support enumeration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_flags, run_opts);
    if (selfplay->parsed()) return cmd_selfplay(self_flags, self_opts);
    if (plot->parsed()) return cmd_plot(plot_in, plot_out);
    if (solve->parsed()) return cmd_solve(game_path, all_equilibria);
  } catch (const ArenaError& e) {
    std::fprintf(stderr, "arena: %s\n", e.what());
    return 2;
  }
  return 1;
}

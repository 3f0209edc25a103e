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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "arena/agents.hpp"
#include "arena/matrix_game.hpp"
#include "arena/report.hpp"
#include "arena/tournament.hpp"

namespace arena {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Matrix uniform_matrix(Rng& rng, int r, int c) {
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

Vector uniform_vector(Rng& rng, int n, double scale = 1.0) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(-scale, scale);
  return v;
}

// 1. Lemke-Howson against support enumeration on random games.
Outcome nash_solver_correctness() {
  Rng rng(20260101);
  const auto t0 = std::chrono::steady_clock::now();
  double worst_residual = 0.0, worst_match = 0.0;
  int mismatched = 0;
  for (int g = 0; g < 200; ++g) {
    const int r = 2 + rng.index(3), c = 2 + rng.index(3);
    const BimatrixGame game(uniform_matrix(rng, r, c), uniform_matrix(rng, r, c));
    const GameSolution lh = lemke_howson(game);
    worst_residual = std::max(worst_residual, deviation_residual(game, lh));
    double best = 1e300;
    for (const GameSolution& e : support_enumeration(game)) {
      const double d = std::max((e.strategy_row.probabilities - lh.strategy_row.probabilities).cwiseAbs().maxCoeff(),
                                (e.strategy_col.probabilities - lh.strategy_col.probabilities).cwiseAbs().maxCoeff());
      best = std::min(best, d);
    }
    worst_match = std::max(worst_match, best);
    mismatched += best > 1e-6;
  }
  const double elapsed = seconds_since(t0);
  return {worst_residual <= 1e-8 && mismatched == 0 && elapsed < 5.0,
          fmt("200 games, worst residual %.2e, worst entry gap %.2e, %.0f unmatched, %.2fs", worst_residual,
              worst_match, mismatched, elapsed)};
}

// 2. Prisoner's Dilemma, Matching Pennies and Rock-Paper-Scissors.
Outcome known_equilibria() {
  Matrix pd_row(2, 2), pd_col(2, 2), mp(2, 2), rps(3, 3);
  pd_row << -1, -3, 0, -2;
  pd_col << -1, 0, -3, -2;
  mp << 1, -1, -1, 1;
  rps << 0, -1, 1, 1, 0, -1, -1, 1, 0;
  const GameSolution pd = lemke_howson(BimatrixGame(pd_row, pd_col));
  const bool defect = pd.strategy_row[1] == 1.0 && pd.strategy_row[0] == 0.0 && pd.strategy_col[1] == 1.0 &&
                      pd.strategy_col[0] == 0.0;
  double worst = 0.0, value = 0.0;
  for (const Matrix& m : {mp, rps}) {
    const GameSolution s = zero_sum_solve(m);
    const double u = 1.0 / static_cast<double>(m.rows());
    worst = std::max({worst, (s.strategy_row.probabilities.array() - u).abs().maxCoeff(),
                      (s.strategy_col.probabilities.array() - u).abs().maxCoeff()});
    value = std::max(value, std::abs(s.value_row));
  }
  return {defect && worst <= 1e-8 && value <= 1e-8,
          std::string(defect ? "PD is mutual defection" : "PD is NOT mutual defection") +
              fmt("; MP and RPS worst strategy gap %.1e, largest |value| %.1e", worst, value)};
}

struct SelfPlayStats {
  double mean_reward = 0.0;  // over seeds of the per-seed last-window mean
  double worst_seed_reward = 0.0;
  double worst_frequency_gap = 0.0;
  double elapsed = 0.0;
};

// Row and column instances of one learner play each other in IMP; the last
// `window` episodes (or transitions) are scored per seed.
SelfPlayStats imp_self_play(const std::string& row_id, const std::string& col_id, const AgentParams& col_params,
                            int seeds, int episodes, int window_episodes, std::uint64_t base) {
  const auto t0 = std::chrono::steady_clock::now();
  MatchingPennies env(100, 1.0);
  SelfPlayStats out;
  for (int s = 0; s < seeds; ++s) {
    const std::uint64_t seed = static_cast<std::uint64_t>(s);
    auto row = make_agent(row_id, AgentContext::for_env(env, Role::kRow), {}, derive_seed(base, {seed, 0}));
    auto col = make_agent(col_id, AgentContext::for_env(env, Role::kCol), col_params, derive_seed(base, {seed, 1}));
    double reward = 0.0;
    long n = 0, row0 = 0, col0 = 0;
    run_match(env, *row, *col, episodes, derive_seed(base, {seed}), s, [&](const StepEvent& e) {
      if (e.episode < episodes - window_episodes) return;
      reward += e.reward_row;
      ++n;
      row0 += e.action_row == 0;
      col0 += e.action_col == 0;
    });
    const double mean = reward / static_cast<double>(n);
    out.mean_reward += mean / seeds;
    if (std::abs(mean) > std::abs(out.worst_seed_reward)) out.worst_seed_reward = mean;
    out.worst_frequency_gap = std::max({out.worst_frequency_gap, std::abs(static_cast<double>(row0) / n - 0.5),
                                        std::abs(static_cast<double>(col0) / n - 0.5)});
  }
  out.elapsed = seconds_since(t0);
  return out;
}

// 3. Meta-Nash self-play stays near the game value.
Outcome meta_nash_self_play() {
  const SelfPlayStats s = imp_self_play("meta_nash", "meta_nash", {}, 25, 50, 10, 303);
  return {std::abs(s.mean_reward) <= 0.15 && s.worst_frequency_gap <= 0.1,
          fmt("mean per-step reward %+.4f (worst seed %+.3f), worst per-seed action frequency gap %.3f, %.0fs",
              s.mean_reward, s.worst_seed_reward, s.worst_frequency_gap, s.elapsed)};
}

// 4. Minimax-DQN (mixed targets) self-play.
Outcome minimax_self_play() {
  const SelfPlayStats s = imp_self_play("minimax_dqn", "minimax_dqn", {}, 25, 50, 10, 404);
  return {std::abs(s.mean_reward) <= 0.15,
          fmt("mean per-step reward %+.4f (worst seed %+.3f), worst per-seed action frequency gap %.3f, %.0fs",
              s.mean_reward, s.worst_seed_reward, s.worst_frequency_gap, s.elapsed)};
}

// 5. BRAT exploits a fixed (0.7, 0.3) opponent.
Outcome brat_exploitation() {
  AgentParams fixed;
  fixed.static_policy = {0.7, 0.3};
  const SelfPlayStats s = imp_self_play("brat", "static", fixed, 25, 50, 10, 505);
  return {s.mean_reward >= 0.3, fmt("mean per-step reward %.4f over 25 seeds (ideal 0.4), %.0fs", s.mean_reward,
                                    s.elapsed)};
}

// Column player whose action is a fixed function of the IMP state.
class LookupAgent final : public Agent {
 public:
  LookupAgent(AgentContext ctx, std::vector<int> table) : Agent(std::move(ctx), {}, 0), table_(std::move(table)) {}
  std::string id() const override { return "lookup"; }
  int act(const State& s) override { return table_[MatchingPennies::state_index(s)]; }
  void observe(const Experience&) override { count_transition(); }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<LookupAgent>(*this); }

 private:
  std::vector<int> table_;
};

// 6. Opponent-model accuracy against a deterministic opponent.
Outcome opponent_model_fidelity() {
  const std::vector<int> table = {1, 0, 0, 1, 0};
  MatchingPennies env(100, 1.0);
  double worst_weighted = 1.0, worst_distinct = 1.0;
  for (int seed = 0; seed < 5; ++seed) {
    BratAgent brat(AgentContext::for_env(env, Role::kRow), {}, derive_seed(606, {static_cast<std::uint64_t>(seed)}));
    LookupAgent opponent(AgentContext::for_env(env, Role::kCol), table);
    brat.begin_match(derive_seed(607, {static_cast<std::uint64_t>(seed)}));
    std::vector<long> visits(5, 0);
    State s = env.reset(0);
    while (brat.opponent_model().updates() < 500) {
      if (env.finished()) {
        s = env.reset(0);
        brat.episode_reset();
      }
      const int a = brat.act(s), b = opponent.act(s);
      const StepResult r = env.step(a, b);
      ++visits[MatchingPennies::state_index(s)];
      brat.observe({s, a, b, r.reward_row, r.next_state, r.terminal});
      brat.learn();
      s = r.next_state;
    }
    long correct = 0, total = 0, distinct = 0, distinct_correct = 0;
    for (int k = 0; k < 5; ++k) {
      if (visits[k] == 0) continue;
      const bool ok = argmax_lowest(brat.opponent_model().policy(MatchingPennies::encode(k))) == table[k];
      correct += ok ? visits[k] : 0;
      total += visits[k];
      ++distinct;
      distinct_correct += ok;
    }
    worst_weighted = std::min(worst_weighted, static_cast<double>(correct) / total);
    worst_distinct = std::min(worst_distinct, static_cast<double>(distinct_correct) / distinct);
  }
  return {worst_weighted > 0.95,
          fmt("after 500 updates, worst visit-weighted accuracy %.4f, worst per-state accuracy %.2f over 5 seeds",
              worst_weighted, worst_distinct)};
}

// 7. Finite-difference audits of every differentiated objective.
Outcome gradient_audits() {
  Rng rng(707);
  std::vector<std::pair<std::string, double>> results;
  auto audit_dense = [&](const std::string& name, int in, int out, auto loss) {
    nn::DenseNetwork net(dense_spec(in, {64, 64}, out), rng);
    nn::Objective f = [&](const Vector& p, Vector* g) {
      nn::DenseNetwork probe = net;
      probe.parameters() = p;
      return loss(probe, g);
    };
    results.emplace_back(name, nn::finite_difference_check(f, net.parameters(), 300, rng));
  };
  const int n = 32;
  Matrix states(8, n);
  std::vector<int> entries(n), actions(n);
  std::vector<double> targets(n), weights(n);
  for (int i = 0; i < n; ++i) {
    states.col(i) = uniform_vector(rng, 8);
    entries[i] = rng.index(25);
    actions[i] = rng.index(5);
    targets[i] = rng.uniform(-1, 1);
    weights[i] = rng.uniform(-2, 2);
  }
  audit_dense("Q-matrix TD loss", 8, 25,
              [&](const nn::DenseNetwork& net, Vector* g) { return squared_entry_loss(net, states, entries, targets, g); });
  std::vector<int> q_entries(n);
  for (int i = 0; i < n; ++i) q_entries[i] = entries[i] % 5;
  audit_dense("Q-vector TD loss", 8, 5, [&](const nn::DenseNetwork& net, Vector* g) {
    return squared_entry_loss(net, states, q_entries, targets, g);
  });
  audit_dense("opponent classifier", 8, 5,
              [&](const nn::DenseNetwork& net, Vector* g) { return OpponentModel::log_loss(net, states, actions, g); });
  audit_dense("PG surrogate", 8, 5, [&](const nn::DenseNetwork& net, Vector* g) {
    return policy_gradient_surrogate(net, states, actions, weights, g);
  });

  // Recurrent chunk loss, jointly over the Q-network and the cell.
  {
    const int hidden = 32, state_dim = 5, opp = 2, own = 2, steps = 8, chunks = 4;
    nn::DenseNetwork q(dense_spec(hidden + state_dim, {64, 64}, own * opp), rng);
    nn::GruCell cell({state_dim + opp, hidden}, rng);
    std::vector<Chunk> cs(chunks);
    for (Chunk& c : cs) {
      for (int k = 0; k < steps; ++k) {
        Transition t;
        t.state = MatchingPennies::encode(rng.index(5));
        t.next_state = MatchingPennies::encode(rng.index(4));
        t.action_row = rng.index(own);
        t.action_col = rng.index(opp);
        t.reward = rng.uniform(-1, 1);
        c.push_back(t);
      }
      c.front().hidden_prev = uniform_vector(rng, hidden, 0.5);
    }
    const ChunkBatch batch = make_chunk_batch(cs, opp, hidden);
    const auto y = meta_nash_targets(q, cell, batch, 1.0, own, opp, TargetValue::kMixed);
    const Eigen::Index nq = q.parameter_count(), nc = cell.parameter_count();
    Vector joint(nq + nc);
    joint << q.parameters(), cell.parameters();
    nn::Objective f = [&](const Vector& p, Vector* g) {
      nn::DenseNetwork qp = q;
      nn::GruCell cp = cell;
      qp.parameters() = p.head(nq);
      cp.parameters() = p.tail(nc);
      Vector gq, gc;
      const double loss = meta_nash_loss(qp, cp, batch, y, g ? &gq : nullptr, g ? &gc : nullptr);
      if (g) {
        g->resize(nq + nc);
        *g << gq, gc;
      }
      return loss;
    };
    results.emplace_back("recurrent chunk loss", nn::finite_difference_check(f, joint, 400, rng));
  }

  // Exact LOLA return map, both sides.
  double lola = 0.0;
  for (bool own_is_row : {true, false}) {
    const Vector own = uniform_vector(rng, 5), opp = uniform_vector(rng, 5);
    const LolaDerivatives d = lola_derivatives(own, opp, own_is_row, 100, 1.0);
    auto value = [&](const Vector& a, const Vector& b) {
      ImpLogits<double> x, z;
      for (int s = 0; s < 5; ++s) {
        x[s] = a[s];
        z[s] = b[s];
      }
      return own_is_row ? imp_expected_return(x, z, 100, 1.0) : -imp_expected_return(z, x, 100, 1.0);
    };
    nn::Objective f_own = [&](const Vector& p, Vector* g) {
      if (g) *g = d.grad_own;
      return value(p, opp);
    };
    nn::Objective f_opp = [&](const Vector& p, Vector* g) {
      if (g) *g = d.grad_opp;
      return value(own, p);
    };
    lola = std::max({lola, nn::finite_difference_check(f_own, own, 5, rng),
                     nn::finite_difference_check(f_opp, opp, 5, rng)});
  }

  bool pass = lola < 1e-5;
  std::string detail;
  for (const auto& [name, err] : results) {
    pass = pass && err < 1e-4;
    detail += name + " " + fmt("%.1e", err) + ", ";
  }
  detail += "LOLA map " + fmt("%.1e", lola);
  return {pass, detail};
}

// 8. A trained Minimax-DQN predator catches a random prey faster than a
// random predator does.
Outcome predator_prey_signal() {
  const auto t0 = std::chrono::steady_clock::now();
  auto env = make_environment("pp1v1", 100);
  const int training_seeds = 5, training_episodes = 1000, evaluation_episodes = 100;
  double trained = 0.0;
  for (int seed = 0; seed < training_seeds; ++seed) {
    const std::uint64_t s = static_cast<std::uint64_t>(seed);
    auto predator = make_agent("minimax_dqn", AgentContext::for_env(*env, Role::kRow), {}, derive_seed(808, {s, 0}));
    auto prey = make_agent("random", AgentContext::for_env(*env, Role::kCol), {}, derive_seed(808, {s, 1}));
    run_match(*env, *predator, *prey, training_episodes, derive_seed(808, {s, 2}));
    predator->set_learning_enabled(false);
    predator->set_epsilon_override(0.0);
    for (const MatchRecord& r : run_match(*env, *predator, *prey, evaluation_episodes, 8080)) trained += r.transitions;
  }
  trained /= training_seeds * evaluation_episodes;
  auto random_predator = make_agent("random", AgentContext::for_env(*env, Role::kRow), {}, 809);
  auto prey = make_agent("random", AgentContext::for_env(*env, Role::kCol), {}, 810);
  double baseline = 0.0;
  for (const MatchRecord& r : run_match(*env, *random_predator, *prey, evaluation_episodes, 8080)) {
    baseline += r.transitions;
  }
  baseline /= evaluation_episodes;
  const double reduction = 1.0 - trained / baseline;
  return {reduction >= 0.25, fmt("mean capture time %.2f vs random predator %.2f (%.1f%% lower), %.0fs", trained,
                                 baseline, 100.0 * reduction, seconds_since(t0))};
}

// 9. Round-robin protocol: match count, zero-sum steps, serial/parallel bytes.
Outcome tournament_fidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  TournamentConfig c = TournamentConfig::defaults_for("imp");
  c.agent_ids = {"minimax_dqn", "brat", "meta_nash", "qlearn", "pg", "wolf_phc"};
  c.trials = 25;
  c.episodes = 4;
  std::atomic<long> steps{0}, violations{0};
  const StepHook hook = [&](const StepEvent& e) {
    ++steps;
    if (e.reward_row + e.reward_col != 0.0 || e.reward_col != -e.reward_row) ++violations;
  };
  const TournamentResults serial = run_round_robin(c, 0, hook);
  const TournamentResults parallel = run_round_robin(c, 4, hook);
  std::set<std::tuple<int, std::string, std::string>> cells;
  for (const MatchRecord& r : serial.records) cells.emplace(r.trial, r.agent_row, r.agent_col);
  const bool identical = records_csv(serial.records) == records_csv(parallel.records);
  const bool count_ok = serial.matches == 375 && static_cast<int>(cells.size()) == 375 &&
                        serial.records.size() == 375u * c.episodes;
  AggregateStats stats = aggregate(serial);
  double closure = 0.0;
  for (const auto& [_, s] : stats.series)
    for (double v : s.episode_sum) closure += v;
  return {count_ok && violations == 0 && identical && closure == 0.0,
          fmt("%.0f matches, %.0f zero-sum violations in %.0f steps, closure %.1g", serial.matches,
              static_cast<double>(violations.load()), static_cast<double>(steps.load()), closure) +
              (identical ? ", serial and 4-thread records.csv identical" : ", serial and parallel records.csv DIFFER") +
              fmt(", %.0fs", seconds_since(t0))};
}

// 10. WoLF-PHC self-play frequencies over the final 1000 of 5000 steps.
Outcome wolf_self_play() {
  const SelfPlayStats s = imp_self_play("wolf_phc", "wolf_phc", {}, 25, 50, 10, 1010);
  return {s.worst_frequency_gap <= 0.1,
          fmt("worst per-seed action frequency gap %.3f over 25 seeds (mean reward %+.4f), %.1fs",
              s.worst_frequency_gap, s.mean_reward, s.elapsed)};
}

}  // namespace
}  // namespace arena

int main() {
  using namespace arena;
  struct Entry {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> criteria = {
      {1, "Nash solver correctness", nash_solver_correctness},
      {2, "known equilibria", known_equilibria},
      {3, "Meta-Nash self-play near zero", meta_nash_self_play},
      {4, "Minimax-DQN self-play near zero", minimax_self_play},
      {5, "BRAT exploits a fixed opponent", brat_exploitation},
      {6, "opponent model fidelity", opponent_model_fidelity},
      {7, "gradient audits", gradient_audits},
      {8, "predator-prey learning signal", predator_prey_signal},
      {9, "tournament protocol fidelity", tournament_fidelity},
      {10, "WoLF-PHC self-play near uniform", wolf_self_play},
  };
  int failures = 0;
  for (const Entry& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %2d: %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

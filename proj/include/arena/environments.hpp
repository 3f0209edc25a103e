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
#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "arena/common.hpp"

namespace arena {

struct EnvSpec {
  int state_dim = 0;
  int actions_row = 0;
  int actions_col = 0;
  int max_steps = 1;
  double discount = 1.0;
};

// Only the row reward is stored; the column player receives its negation.
struct StepResult {
  State next_state;
  double reward_row = 0.0;
  bool terminal = false;

  double reward_col() const { return -reward_row; }
};

class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string id() const = 0;
  virtual EnvSpec spec() const = 0;
  virtual State reset(std::uint64_t seed) = 0;
  virtual StepResult step(int action_row, int action_col) = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;

  int steps() const { return steps_; }
  bool finished() const { return finished_; }

 protected:
  void check_running() const {
    if (finished_) throw ArenaError(ErrorCode::kEpisodeFinished, "step called on a finished episode");
  }

  int steps_ = 0;
  bool finished_ = false;
};

// Mixed-radix encoding; the first action is the most significant digit.
inline int joint_action_encode(std::span<const int> actions, int base) {
  int code = 0;
  for (int a : actions) {
    if (a < 0 || a >= base) throw ArenaError(ErrorCode::kActionOutOfRange, "per-agent action exceeds base");
    code = code * base + a;
  }
  return code;
}

inline std::vector<int> joint_action_decode(int code, int base, int count) {
  int limit = 1;
  for (int i = 0; i < count; ++i) limit *= base;
  if (code < 0 || code >= limit) throw ArenaError(ErrorCode::kActionOutOfRange, "joint action out of range");
  std::vector<int> actions(count);
  for (int i = count - 1; i >= 0; --i) {
    actions[i] = code % base;
    code /= base;
  }
  return actions;
}

// Iterated Matching Pennies. State is a one-hot over the previous joint
// action (index 2a+b) plus a start token at index 4.
class MatchingPennies final : public Environment {
 public:
  static constexpr int kStartToken = 4;
  static constexpr int kStateDim = 5;

  explicit MatchingPennies(int max_steps = 100, double discount = 1.0)
      : max_steps_(max_steps), discount_(discount) {
    if (max_steps < 1 || discount < 0.0 || discount > 1.0) {
      throw ArenaError(ErrorCode::kConfigInvalid, "invalid IMP horizon or discount");
    }
  }

  static double payoff(int a, int b) { return a == b ? 1.0 : -1.0; }

  static State encode(int index) {
    State s = State::Zero(kStateDim);
    s[index] = 1.0;
    return s;
  }

  // Index of a one-hot IMP state.
  static int state_index(const State& s) {
    Eigen::Index i = 0;
    s.maxCoeff(&i);
    return static_cast<int>(i);
  }

  std::string id() const override { return "imp"; }

  EnvSpec spec() const override { return {kStateDim, 2, 2, max_steps_, discount_}; }

  State reset(std::uint64_t /*seed*/) override {
    steps_ = 0;
    finished_ = false;
    return encode(kStartToken);
  }

  StepResult step(int a, int b) override {
    check_running();
    if (a < 0 || a > 1 || b < 0 || b > 1) throw ArenaError(ErrorCode::kActionOutOfRange, "IMP actions are 0 or 1");
    ++steps_;
    finished_ = steps_ >= max_steps_;
    return {encode(2 * a + b), payoff(a, b), finished_};
  }

  std::unique_ptr<Environment> clone() const override { return std::make_unique<MatchingPennies>(*this); }

 private:
  int max_steps_;
  double discount_;
};

struct GridConfig {
  int width = 5;
  int height = 5;
  int n_predators = 1;
  double capture_reward = 1.0;
  int max_steps = 100;
  double discount = 0.99;
};

enum class Move : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3, kStay = 4 };
inline constexpr int kMoveCount = 5;

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
};

// Predator-prey pursuit on a bounded grid. The predators form the row
// player through the joint action space; the prey is the column player.
class PredatorPrey final : public Environment {
 public:
  explicit PredatorPrey(GridConfig config) : config_(config) {
    if (config.width < 3 || config.height < 3 || (config.n_predators != 1 && config.n_predators != 3) ||
        config.n_predators + 1 > config.width * config.height || config.max_steps < 1 ||
        config.discount < 0.0 || config.discount > 1.0) {
      throw ArenaError(ErrorCode::kConfigInvalid, "invalid predator-prey configuration");
    }
    joint_actions_ = 1;
    for (int i = 0; i < config.n_predators; ++i) joint_actions_ *= kMoveCount;
    predators_.resize(config.n_predators);
  }

  std::string id() const override { return config_.n_predators == 1 ? "pp1v1" : "pp3v1"; }

  EnvSpec spec() const override {
    return {2 * (config_.n_predators + 1), joint_actions_, kMoveCount, config_.max_steps, config_.discount};
  }

  const GridConfig& config() const { return config_; }
  const std::vector<Cell>& predators() const { return predators_; }
  const Cell& prey() const { return prey_; }

  State reset(std::uint64_t seed) override {
    Rng rng(seed);
    const int cells = config_.width * config_.height;
    std::vector<int> chosen;
    while (static_cast<int>(chosen.size()) < config_.n_predators + 1) {
      const int c = rng.index(cells);
      if (std::find(chosen.begin(), chosen.end(), c) == chosen.end()) chosen.push_back(c);
    }
    for (int i = 0; i < config_.n_predators; ++i) predators_[i] = {chosen[i] % config_.width, chosen[i] / config_.width};
    prey_ = {chosen.back() % config_.width, chosen.back() / config_.width};
    steps_ = 0;
    finished_ = false;
    return observation();
  }

  // Places agents directly; used by tests and scripted scenarios.
  State set_positions(std::vector<Cell> predators, Cell prey) {
    if (static_cast<int>(predators.size()) != config_.n_predators) {
      throw ArenaError(ErrorCode::kConfigInvalid, "predator count mismatch");
    }
    for (const Cell& c : predators) check_cell(c);
    check_cell(prey);
    predators_ = std::move(predators);
    prey_ = prey;
    steps_ = 0;
    finished_ = false;
    return observation();
  }

  StepResult step(int joint_predator_action, int prey_action) override {
    check_running();
    if (joint_predator_action < 0 || joint_predator_action >= joint_actions_ || prey_action < 0 ||
        prey_action >= kMoveCount) {
      throw ArenaError(ErrorCode::kActionOutOfRange, "predator-prey action out of range");
    }
    const std::vector<int> moves = joint_action_decode(joint_predator_action, kMoveCount, config_.n_predators);
    const std::vector<Cell> before = predators_;
    const Cell prey_before = prey_;
    for (int i = 0; i < config_.n_predators; ++i) predators_[i] = moved(predators_[i], moves[i]);
    prey_ = moved(prey_, prey_action);

    bool caught = false;
    for (int i = 0; i < config_.n_predators; ++i) {
      const bool same_cell = predators_[i] == prey_;
      const bool swapped = predators_[i] == prey_before && before[i] == prey_;
      caught |= same_cell || swapped;
    }
    ++steps_;
    finished_ = caught || steps_ >= config_.max_steps;
    return {observation(), caught ? config_.capture_reward : 0.0, finished_};
  }

  std::unique_ptr<Environment> clone() const override { return std::make_unique<PredatorPrey>(*this); }

 private:
  void check_cell(const Cell& c) const {
    if (c.x < 0 || c.y < 0 || c.x >= config_.width || c.y >= config_.height) {
      throw ArenaError(ErrorCode::kConfigInvalid, "cell outside the grid");
    }
  }

  Cell moved(Cell c, int move) const {
    switch (static_cast<Move>(move)) {
      case Move::kUp: c.y = std::min(c.y + 1, config_.height - 1); break;
      case Move::kDown: c.y = std::max(c.y - 1, 0); break;
      case Move::kLeft: c.x = std::max(c.x - 1, 0); break;
      case Move::kRight: c.x = std::min(c.x + 1, config_.width - 1); break;
      case Move::kStay: break;
    }
    return c;
  }

  State observation() const {
    State s(2 * (config_.n_predators + 1));
    const double sx = 1.0 / (config_.width - 1);
    const double sy = 1.0 / (config_.height - 1);
    int k = 0;
    for (const Cell& c : predators_) {
      s[k++] = c.x * sx;
      s[k++] = c.y * sy;
    }
    s[k++] = prey_.x * sx;
    s[k++] = prey_.y * sy;
    return s;
  }

  GridConfig config_;
  int joint_actions_ = kMoveCount;
  std::vector<Cell> predators_;
  Cell prey_;
};

// Environment ids: "imp", "pp1v1", "pp3v1". A discount below zero keeps the
// environment's default.
inline std::unique_ptr<Environment> make_environment(std::string_view id, int max_steps = 100,
                                                     double discount = -1.0) {
  if (id == "imp") return std::make_unique<MatchingPennies>(max_steps, discount < 0.0 ? 1.0 : discount);
  if (id == "pp1v1" || id == "pp3v1") {
    GridConfig config;
    config.n_predators = id == "pp1v1" ? 1 : 3;
    config.max_steps = max_steps;
    if (discount >= 0.0) config.discount = discount;
    return std::make_unique<PredatorPrey>(config);
  }
  throw ArenaError(ErrorCode::kConfigInvalid, "unknown environment id: " + std::string(id));
}

inline double default_discount(std::string_view env_id) { return env_id == "imp" ? 1.0 : 0.99; }

}  // namespace arena

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

#include <deque>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "arena/agents/minimax_dqn.hpp"

namespace arena {

// Expected value of each own action against an opponent mixed strategy.
inline Vector brat_action_values(const Matrix& q, const Vector& opponent_policy) {
  if (q.cols() != opponent_policy.size()) {
    throw ArenaError(ErrorCode::kDimensionMismatch, "opponent policy size must match Q-matrix columns");
  }
  return q * opponent_policy;
}

inline int brat_best_response(const Matrix& q, const Vector& opponent_policy) {
  return argmax_lowest(brat_action_values(q, opponent_policy));
}

inline double brat_td_target(double reward, const Vector& next_opponent_policy, const Matrix& next_q, bool terminal,
                             double gamma, BratTarget mode, TargetValue value = TargetValue::kMixed) {
  if (terminal) return reward;
  if (mode == BratTarget::kMinimax) return minimax_td_target(reward, next_q, terminal, gamma, value);
  return reward + gamma * brat_action_values(next_q, next_opponent_policy).maxCoeff();
}

// Softmax classifier over opponent actions, trained by log-loss.
class OpponentModel {
 public:
  OpponentModel() = default;
  OpponentModel(int state_dim, int opp_actions, const std::vector<int>& hidden, double learning_rate, Rng& rng)
      : net_(dense_spec(state_dim, hidden, opp_actions), rng), optimizer_(net_.parameter_count(), {learning_rate}) {}

  Vector policy(const State& s) const { return nn::softmax(net_.evaluate(s)); }
  Matrix policies(const Matrix& states) const { return nn::softmax_columns(net_.forward(states)); }

  nn::DenseNetwork& network() { return net_; }
  const nn::DenseNetwork& network() const { return net_; }
  std::int64_t updates() const { return optimizer_.step_count(); }

  // One Adam step on the mean log-loss; returns the loss before the step.
  double update(const Matrix& states, std::span<const int> actions) {
    Vector grad;
    const double loss = log_loss(net_, states, actions, &grad);
    optimizer_.step(net_.parameters(), grad);
    return loss;
  }

  static double log_loss(const nn::DenseNetwork& net, const Matrix& states, std::span<const int> actions,
                         Vector* grad) {
    const Eigen::Index n = states.cols();
    if (n == 0) throw ArenaError(ErrorCode::kInsufficientData, "empty opponent-model batch");
    if (static_cast<Eigen::Index>(actions.size()) != n) {
      throw ArenaError(ErrorCode::kDimensionMismatch, "one observed action per state");
    }
    nn::DenseTape tape;
    const Matrix logits = net.forward(states, grad ? &tape : nullptr);
    Matrix logit_grad(logits.rows(), n);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const nn::LogLoss l = nn::softmax_logloss(logits.col(i), actions[i]);
      loss += l.loss;
      logit_grad.col(i) = l.logit_grad / static_cast<double>(n);
    }
    if (grad) {
      *grad = Vector::Zero(net.parameter_count());
      net.backward(tape, logit_grad, *grad);
    }
    return loss / static_cast<double>(n);
  }

 private:
  nn::DenseNetwork net_;
  nn::AdamOptimizer optimizer_;
};

// Best response to a learned opponent model. Every observed opponent
// action is logged, including the opponent's exploratory ones.
class BratAgent final : public QMatrixAgent {
 public:
  BratAgent(AgentContext ctx, AgentParams params, std::uint64_t seed)
      : QMatrixAgent(std::move(ctx), std::move(params), seed) {
    model_ = OpponentModel(ctx_.state_dim, ctx_.opp_actions, params_.hidden, params_.learning_rate, rng_);
  }

  std::string id() const override { return "brat"; }

  int act(const State& s) override {
    if (explore()) return random_action();
    return brat_best_response(q_matrix(s), model_.policy(s));
  }

  void observe(const Experience& e) override {
    QMatrixAgent::observe(e);
    recent_.emplace_back(e.state, e.opp_action);
    while (static_cast<int>(recent_.size()) > params_.opponent_window) recent_.pop_front();
  }

  void begin_match(std::uint64_t seed) override {
    QMatrixAgent::begin_match(seed);
    recent_.clear();
  }

  // One log-loss step on the most recent opponent window.
  double update_opponent_model() {
    if (recent_.empty()) throw ArenaError(ErrorCode::kInsufficientData, "no opponent actions observed");
    Matrix states(ctx_.state_dim, static_cast<Eigen::Index>(recent_.size()));
    std::vector<int> actions(recent_.size());
    for (std::size_t i = 0; i < recent_.size(); ++i) {
      states.col(static_cast<Eigen::Index>(i)) = recent_[i].first;
      actions[i] = recent_[i].second;
    }
    return model_.update(states, actions);
  }

  OpponentModel& opponent_model() { return model_; }
  const OpponentModel& opponent_model() const { return model_; }

  std::unique_ptr<Agent> clone() const override { return std::make_unique<BratAgent>(*this); }

 protected:
  double bootstrap_target(const Transition& t, const Matrix& next_q) const override {
    if (t.terminal) return t.reward;
    const Vector pi = params_.brat_target == BratTarget::kGreedy ? model_.policy(t.next_state) : Vector();
    return brat_td_target(t.reward, pi, next_q, t.terminal, ctx_.gamma, params_.brat_target, params_.target_value);
  }

  void after_learn(const std::vector<Transition>& /*batch*/) override { update_opponent_model(); }

 private:
  OpponentModel model_;
  std::deque<std::pair<State, int>> recent_;
};

}  // namespace arena

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

// Discounted return-to-go for each step of an episode.
inline std::vector<double> returns_to_go(const std::vector<double>& rewards, double gamma) {
  std::vector<double> g(rewards.size());
  double running = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    running = rewards[t] + gamma * running;
    g[t] = running;
  }
  return g;
}

// Surrogate -(1/T) sum_t weight_t log pi(a_t | s_t) over softmax logits.
inline double policy_gradient_surrogate(const nn::DenseNetwork& net, const Matrix& states, std::span<const int> actions,
                                        std::span<const double> weights, Vector* grad) {
  const Eigen::Index n = states.cols();
  if (n == 0) throw ArenaError(ErrorCode::kEmptyTrajectory, "no steps in the trajectory");
  nn::DenseTape tape;
  const Matrix logits = net.forward(states, grad ? &tape : nullptr);
  Matrix logit_grad(logits.rows(), n);
  double loss = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const nn::LogLoss l = nn::softmax_logloss(logits.col(t), actions[t]);
    loss += weights[t] * l.loss;
    logit_grad.col(t) = weights[t] * l.logit_grad / static_cast<double>(n);
  }
  if (grad) {
    *grad = Vector::Zero(net.parameter_count());
    net.backward(tape, logit_grad, *grad);
  }
  return loss / static_cast<double>(n);
}

// Episodic score-function policy gradient with a mean-return baseline.
class PolicyGradientAgent final : public Agent {
 public:
  PolicyGradientAgent(AgentContext ctx, AgentParams params, std::uint64_t seed)
      : Agent(std::move(ctx), std::move(params), seed) {
    net_ = nn::DenseNetwork(dense_spec(ctx_.state_dim, params_.hidden, ctx_.own_actions), rng_);
    optimizer_ = nn::AdamOptimizer(net_.parameter_count(), {params_.learning_rate});
  }

  std::string id() const override { return "pg"; }

  Vector policy(const State& s) const { return nn::softmax(net_.evaluate(s)); }

  int act(const State& s) override { return rng_.categorical(policy(s)); }

  void observe(const Experience& e) override {
    states_.push_back(e.state);
    actions_.push_back(e.own_action);
    rewards_.push_back(e.reward);
    episode_done_ = e.terminal;
    count_transition();
  }

  std::optional<double> learn() override {
    if (!learning_ || !episode_done_) return std::nullopt;
    const double loss = learn_episode(states_, actions_, rewards_);
    clear_trajectory();
    return loss;
  }

  // Advantage weights for one episode: returns-to-go, centered on their
  // mean when the baseline is enabled.
  std::vector<double> advantages(const std::vector<double>& rewards) const {
    std::vector<double> g = returns_to_go(rewards, ctx_.gamma);
    if (params_.pg_baseline && !g.empty()) {
      double mean = 0.0;
      for (double v : g) mean += v;
      mean /= static_cast<double>(g.size());
      for (double& v : g) v -= mean;
    }
    return g;
  }

  double learn_episode(const std::vector<State>& states, const std::vector<int>& actions,
                       const std::vector<double>& rewards) {
    if (states.empty()) throw ArenaError(ErrorCode::kEmptyTrajectory, "policy gradient needs a complete episode");
    const std::vector<double> weights = advantages(rewards);
    Vector grad;
    const double loss = policy_gradient_surrogate(net_, stack_columns(states), actions, weights, &grad);
    // A centered estimator with every return equal to the baseline carries
    // no signal; skipping keeps Adam's stale moments from moving the policy.
    if (grad.isZero(0.0)) return loss;
    optimizer_.step(net_.parameters(), grad);
    return loss;
  }

  void episode_reset() override {
    Agent::episode_reset();
    clear_trajectory();
  }

  void begin_match(std::uint64_t seed) override {
    Agent::begin_match(seed);
    clear_trajectory();
  }

  nn::DenseNetwork& network() { return net_; }

  std::unique_ptr<Agent> clone() const override { return std::make_unique<PolicyGradientAgent>(*this); }

 private:
  void clear_trajectory() {
    states_.clear();
    actions_.clear();
    rewards_.clear();
    episode_done_ = false;
  }

  nn::DenseNetwork net_;
  nn::AdamOptimizer optimizer_;
  std::vector<State> states_;
  std::vector<int> actions_;
  std::vector<double> rewards_;
  bool episode_done_ = false;
};

}  // namespace arena

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

#include "arena/agents/minimax_dqn.hpp"

namespace arena {

// Sampled chunks laid out step-major: entry k of each vector holds step k of
// every chunk, one chunk per column.
struct ChunkBatch {
  Matrix h0;
  std::vector<Matrix> states;
  std::vector<Matrix> next_states;
  std::vector<Matrix> recurrent_inputs;
  std::vector<std::vector<int>> entries;
  std::vector<std::vector<double>> rewards;
  std::vector<std::vector<bool>> terminal;

  int steps() const { return static_cast<int>(states.size()); }
  int width() const { return static_cast<int>(h0.cols()); }
};

// Recurrent input for one step: the state followed by a one-hot of the
// opponent's action.
inline Vector recurrent_input(const State& s, int opp_action, int opp_actions) {
  Vector x(s.size() + opp_actions);
  x << s, one_hot(opp_action, opp_actions);
  return x;
}

inline Matrix stack_rows(const Matrix& top, const Matrix& bottom) {
  Matrix m(top.rows() + bottom.rows(), top.cols());
  m << top, bottom;
  return m;
}

inline ChunkBatch make_chunk_batch(const std::vector<Chunk>& chunks, int opp_actions, int hidden_dim) {
  if (chunks.empty() || chunks.front().empty()) throw ArenaError(ErrorCode::kInsufficientData, "no chunks");
  const int n = static_cast<int>(chunks.size());
  const int steps = static_cast<int>(chunks.front().size());
  const int state_dim = static_cast<int>(chunks.front().front().state.size());
  ChunkBatch b;
  b.h0 = Matrix::Zero(hidden_dim, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(chunks[i].size()) != steps) {
      throw ArenaError(ErrorCode::kDimensionMismatch, "chunks must share one length");
    }
    if (chunks[i].front().hidden_prev) b.h0.col(i) = *chunks[i].front().hidden_prev;
  }
  for (int k = 0; k < steps; ++k) {
    Matrix s(state_dim, n), s_next(state_dim, n), x(state_dim + opp_actions, n);
    std::vector<int> entries(n);
    std::vector<double> rewards(n);
    std::vector<bool> terminal(n);
    for (int i = 0; i < n; ++i) {
      const Transition& t = chunks[i][k];
      s.col(i) = t.state;
      s_next.col(i) = t.next_state;
      x.col(i) = recurrent_input(t.state, t.action_col, opp_actions);
      entries[i] = t.action_row * opp_actions + t.action_col;
      rewards[i] = t.reward;
      terminal[i] = t.terminal;
    }
    b.states.push_back(std::move(s));
    b.next_states.push_back(std::move(s_next));
    b.recurrent_inputs.push_back(std::move(x));
    b.entries.push_back(std::move(entries));
    b.rewards.push_back(std::move(rewards));
    b.terminal.push_back(std::move(terminal));
  }
  return b;
}

// TD targets per step and chunk. Contexts are recomputed by unrolling the
// cell from the stored hidden states and then treated as constants.
inline std::vector<std::vector<double>> meta_nash_targets(const nn::DenseNetwork& target_net, const nn::GruCell& cell,
                                                          const ChunkBatch& b, double gamma, int own_actions,
                                                          int opp_actions, TargetValue mode) {
  std::vector<std::vector<double>> y(b.steps(), std::vector<double>(b.width()));
  Matrix h = b.h0;
  for (int k = 0; k < b.steps(); ++k) {
    Matrix h_next = cell.forward(h, b.recurrent_inputs[k]);
    const Matrix next_q = target_net.forward(stack_rows(h_next, b.next_states[k]));
    for (int i = 0; i < b.width(); ++i) {
      const Matrix q = nn::as_q_matrix(next_q.col(i), own_actions, opp_actions);
      y[k][i] = minimax_td_target(b.rewards[k][i], q, b.terminal[k][i], gamma, mode);
    }
    h = std::move(h_next);
  }
  return y;
}

// Mean squared TD error over every step of every chunk, differentiated
// jointly through the Q-network and the unrolled cell.
inline double meta_nash_loss(const nn::DenseNetwork& q_net, const nn::GruCell& cell, const ChunkBatch& b,
                             const std::vector<std::vector<double>>& targets, Vector* q_grad, Vector* cell_grad) {
  const int steps = b.steps();
  const int n = b.width();
  const double count = static_cast<double>(steps) * n;
  const bool want_grad = q_grad || cell_grad;
  std::vector<nn::DenseTape> q_tapes(steps);
  std::vector<nn::GruStepTape> cell_tapes(steps);
  std::vector<Matrix> out_grads(steps);
  double loss = 0.0;
  Matrix h = b.h0;
  for (int k = 0; k < steps; ++k) {
    const Matrix q = q_net.forward(stack_rows(h, b.states[k]), want_grad ? &q_tapes[k] : nullptr);
    out_grads[k] = Matrix::Zero(q.rows(), n);
    for (int i = 0; i < n; ++i) {
      const double diff = q(b.entries[k][i], i) - targets[k][i];
      loss += diff * diff;
      out_grads[k](b.entries[k][i], i) = 2.0 * diff / count;
    }
    h = cell.forward(h, b.recurrent_inputs[k], want_grad ? &cell_tapes[k] : nullptr);
  }
  if (want_grad) {
    const Eigen::Index hidden = b.h0.rows();
    Vector gq = Vector::Zero(q_net.parameter_count());
    std::vector<Matrix> h_grads(steps, Matrix::Zero(hidden, n));
    for (int k = 0; k < steps; ++k) {
      const Matrix input_grad = q_net.backward(q_tapes[k], out_grads[k], gq);
      // Q-input at step k reads the output of cell step k - 1.
      if (k > 0) h_grads[k - 1] = input_grad.topRows(hidden);
    }
    if (q_grad) *q_grad = std::move(gq);
    if (cell_grad) *cell_grad = cell.backward_through_time(cell_tapes, h_grads);
  }
  return loss / count;
}

class MetaNashAgent final : public Agent {
 public:
  MetaNashAgent(AgentContext ctx, AgentParams params, std::uint64_t seed)
      : Agent(std::move(ctx), std::move(params), seed), replay_(static_cast<std::size_t>(params_.replay_capacity)) {
    q_ = TargetedNetwork(dense_spec(params_.context_dim + ctx_.state_dim, params_.hidden,
                                    ctx_.own_actions * ctx_.opp_actions),
                         params_.learning_rate, params_.sync_period, rng_);
    cell_ = nn::GruCell({ctx_.state_dim + ctx_.opp_actions, params_.context_dim}, rng_);
    cell_optimizer_ = nn::AdamOptimizer(cell_.parameter_count(), {params_.learning_rate});
    hidden_ = Vector::Zero(params_.context_dim);
  }

  std::string id() const override { return "meta_nash"; }

  Matrix q_matrix(const Vector& context, const State& s) const {
    Vector in(context.size() + s.size());
    in << context, s;
    return nn::as_q_matrix(q_.online().evaluate(in), ctx_.own_actions, ctx_.opp_actions);
  }

  int act(const State& s) override {
    if (explore()) return random_action();
    return minimax_action(q_matrix(hidden_, s), TargetValue::kMixed, rng_);
  }

  void observe(const Experience& e) override {
    Transition t = to_transition(e, episode_, step_in_episode_);
    Vector next = cell_.step(hidden_, recurrent_input(e.state, e.opp_action, ctx_.opp_actions));
    t.hidden_prev = hidden_;
    t.context = next;
    replay_.push(std::move(t));
    hidden_ = std::move(next);
    count_transition();
  }

  std::optional<double> learn() override {
    if (!learn_due()) return std::nullopt;
    const std::size_t length = static_cast<std::size_t>(params_.gru_length);
    if (replay_.chunk_starts(length).empty()) return std::nullopt;
    const ChunkBatch batch = make_chunk_batch(
        replay_.sample_chunks(length, static_cast<std::size_t>(params_.chunk_batch), rng_), ctx_.opp_actions,
        params_.context_dim);
    return learn_on(batch);
  }

  double learn_on(const ChunkBatch& batch) {
    const auto targets = meta_nash_targets(q_.target(), cell_, batch, ctx_.gamma, ctx_.own_actions,
                                           ctx_.opp_actions, TargetValue::kMixed);
    Vector q_grad, cell_grad;
    const double loss = meta_nash_loss(q_.online(), cell_, batch, targets, &q_grad, &cell_grad);
    if (!q_grad.allFinite() || !cell_grad.allFinite()) {
      throw ArenaError(ErrorCode::kNonFiniteGradient, "meta-nash gradient has a non-finite entry");
    }
    q_.apply(q_grad);
    cell_optimizer_.step(cell_.parameters(), cell_grad);
    return loss;
  }

  void episode_reset() override {
    Agent::episode_reset();
    hidden_.setZero();
  }

  void begin_match(std::uint64_t seed) override {
    Agent::begin_match(seed);
    replay_.clear();
    hidden_.setZero();
  }

  const Vector& context_state() const { return hidden_; }
  TargetedNetwork& network() { return q_; }
  nn::GruCell& cell() { return cell_; }
  const ReplayBuffer& replay() const { return replay_; }

  std::unique_ptr<Agent> clone() const override { return std::make_unique<MetaNashAgent>(*this); }

 private:
  TargetedNetwork q_;
  nn::GruCell cell_;
  nn::AdamOptimizer cell_optimizer_;
  ReplayBuffer replay_;
  Vector hidden_;
};

}  // namespace arena

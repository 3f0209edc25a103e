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

#include <span>
#include <vector>

#include "arena/agents/agent.hpp"
#include "arena/nn.hpp"
#include "arena/replay.hpp"

namespace arena {

inline nn::DenseNetworkSpec dense_spec(int input, const std::vector<int>& hidden, int output,
                                       nn::OutputKind kind = nn::OutputKind::kLinear) {
  nn::DenseNetworkSpec spec;
  spec.layer_widths.push_back(input);
  for (int h : hidden) spec.layer_widths.push_back(h);
  spec.layer_widths.push_back(output);
  spec.activation = nn::Activation::kTanh;
  spec.output = kind;
  return spec;
}

// Mean of (Q_entry - target)^2 over the batch, where column i of `inputs`
// is scored at output row entries[i]. Only the selected entries receive
// gradient. The parameter gradient is written to `grad`; the input gradient
// to `input_grad` when requested.
inline double squared_entry_loss(const nn::DenseNetwork& net, const Matrix& inputs, std::span<const int> entries,
                                 std::span<const double> targets, Vector* grad, Matrix* input_grad = nullptr) {
  const Eigen::Index n = inputs.cols();
  if (n == 0) throw ArenaError(ErrorCode::kInsufficientData, "empty minibatch");
  if (static_cast<Eigen::Index>(entries.size()) != n || static_cast<Eigen::Index>(targets.size()) != n) {
    throw ArenaError(ErrorCode::kDimensionMismatch, "one entry and one target per input column");
  }
  nn::DenseTape tape;
  const Matrix out = net.forward(inputs, grad || input_grad ? &tape : nullptr);
  Matrix out_grad = Matrix::Zero(out.rows(), n);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double diff = out(entries[i], i) - targets[i];
    loss += diff * diff;
    out_grad(entries[i], i) = 2.0 * diff / static_cast<double>(n);
  }
  if (grad || input_grad) {
    Vector g = Vector::Zero(net.parameter_count());
    Matrix ig = net.backward(tape, out_grad, g);
    if (grad) *grad = std::move(g);
    if (input_grad) *input_grad = std::move(ig);
  }
  return loss / static_cast<double>(n);
}

// Online network, its delayed target copy and their optimizer.
class TargetedNetwork {
 public:
  TargetedNetwork() = default;
  TargetedNetwork(const nn::DenseNetworkSpec& spec, double learning_rate, int sync_period, Rng& rng)
      : online_(spec, rng), target_(online_), optimizer_(online_.parameter_count(), {learning_rate}),
        sync_period_(sync_period) {}

  nn::DenseNetwork& online() { return online_; }
  const nn::DenseNetwork& online() const { return online_; }
  const nn::DenseNetwork& target() const { return target_; }

  void sync() { target_.parameters() = online_.parameters(); }

  // Applies one optimizer step and syncs the target on schedule.
  void apply(const Vector& grad) {
    optimizer_.step(online_.parameters(), grad);
    if (++updates_ % sync_period_ == 0) sync();
  }

  std::int64_t updates() const { return updates_; }

 private:
  nn::DenseNetwork online_;
  nn::DenseNetwork target_;
  nn::AdamOptimizer optimizer_;
  int sync_period_ = 100;
  std::int64_t updates_ = 0;
};

inline Transition to_transition(const Experience& e, std::int64_t episode, int step) {
  Transition t;
  t.state = e.state;
  t.action_row = e.own_action;
  t.action_col = e.opp_action;
  t.reward = e.reward;
  t.next_state = e.next_state;
  t.terminal = e.terminal;
  t.episode_id = episode;
  t.step_index = step;
  return t;
}

}  // namespace arena

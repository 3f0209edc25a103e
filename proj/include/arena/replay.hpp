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

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "arena/common.hpp"

namespace arena {

// One stored step, always from the storing agent's perspective: action_row
// is the agent's own action (the Q-matrix row) and action_col the
// opponent's (the Q-matrix column); reward is the agent's own reward.
struct Transition {
  State state;
  int action_row = 0;
  int action_col = 0;
  double reward = 0.0;
  State next_state;
  bool terminal = false;
  std::optional<Vector> hidden_prev;
  std::optional<Vector> context;
  std::int64_t episode_id = 0;
  int step_index = 0;
};

using Chunk = std::vector<Transition>;

// Bounded FIFO transition store.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 10000) : capacity_(capacity) {
    if (capacity == 0) throw ArenaError(ErrorCode::kConfigInvalid, "replay capacity must be positive");
  }

  void push(Transition t) {
    if (entries_.size() == capacity_) entries_.pop_front();
    entries_.push_back(std::move(t));
  }

  void clear() { entries_.clear(); }

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }
  const Transition& operator[](std::size_t i) const { return entries_[i]; }
  const Transition& back() const { return entries_.back(); }

  // Uniform draws with replacement.
  std::vector<Transition> sample_minibatch(std::size_t n, Rng& rng) const {
    if (n == 0 || entries_.size() < n) {
      throw ArenaError(ErrorCode::kInsufficientData, "replay holds fewer transitions than the minibatch");
    }
    std::vector<Transition> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(entries_[static_cast<std::size_t>(rng.index(static_cast<int>(entries_.size())))]);
    return out;
  }

  // Start positions of every run of `length` entries sharing an episode id
  // with consecutive step indices.
  std::vector<std::size_t> chunk_starts(std::size_t length) const {
    std::vector<std::size_t> starts;
    if (length == 0) return starts;
    std::size_t run = 0;  // length of the contiguous run ending at i
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const bool continues = i > 0 && entries_[i].episode_id == entries_[i - 1].episode_id &&
                             entries_[i].step_index == entries_[i - 1].step_index + 1;
      run = continues ? run + 1 : 1;
      if (run >= length) starts.push_back(i + 1 - length);
    }
    return starts;
  }

  // Uniformly chosen valid chunks, with replacement. Each chunk's first
  // transition carries the hidden state its writer recorded.
  std::vector<Chunk> sample_chunks(std::size_t length, std::size_t n, Rng& rng) const {
    const std::vector<std::size_t> starts = chunk_starts(length);
    if (starts.empty() || n == 0) {
      throw ArenaError(ErrorCode::kInsufficientData, "no contiguous segment of the requested length");
    }
    std::vector<Chunk> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t s = starts[static_cast<std::size_t>(rng.index(static_cast<int>(starts.size())))];
      out.emplace_back(entries_.begin() + static_cast<std::ptrdiff_t>(s),
                       entries_.begin() + static_cast<std::ptrdiff_t>(s + length));
    }
    return out;
  }

 private:
  std::size_t capacity_;
  std::deque<Transition> entries_;
};

}  // namespace arena

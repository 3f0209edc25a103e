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

#include "arena/replay.hpp"

#include <gtest/gtest.h>

#include <map>

namespace arena {
namespace {

Transition step(std::int64_t episode, int index, double reward = 0.0) {
  Transition t;
  t.state = State::Constant(2, index);
  t.next_state = State::Constant(2, index + 1);
  t.reward = reward;
  t.episode_id = episode;
  t.step_index = index;
  return t;
}

void check_chunk(const Chunk& c, std::size_t length) {
  ASSERT_EQ(c.size(), length);
  for (std::size_t i = 1; i < c.size(); ++i) {
    EXPECT_EQ(c[i].episode_id, c[0].episode_id);
    EXPECT_EQ(c[i].step_index, c[i - 1].step_index + 1);
  }
}

TEST(ReplayBuffer, PushAndEvict) {
  ReplayBuffer buf(3);
  buf.push(step(0, 0, 1));
  EXPECT_EQ(buf.size(), 1u);
  buf.push(step(0, 1, 2));
  buf.push(step(0, 2, 3));
  buf.push(step(0, 3, 4));
  ASSERT_EQ(buf.size(), 3u);
  EXPECT_EQ(buf[0].reward, 2);
  EXPECT_EQ(buf[1].reward, 3);
  EXPECT_EQ(buf[2].reward, 4);
  EXPECT_EQ(buf[2].episode_id, 0);
  EXPECT_EQ(buf[2].step_index, 3);
}

TEST(ReplayBuffer, FifoPropertyOverRandomSequences) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t cap = 1 + static_cast<std::size_t>(rng.index(20));
    const int pushes = rng.index(60);
    ReplayBuffer buf(cap);
    for (int i = 0; i < pushes; ++i) buf.push(step(0, i, i));
    const std::size_t expected = std::min<std::size_t>(cap, static_cast<std::size_t>(pushes));
    ASSERT_EQ(buf.size(), expected);
    for (std::size_t k = 0; k < expected; ++k) {
      EXPECT_EQ(buf[k].reward, static_cast<double>(pushes - static_cast<int>(expected) + static_cast<int>(k)));
    }
  }
}

TEST(ReplayBuffer, MinibatchBasics) {
  ReplayBuffer buf(10);
  buf.push(step(3, 7, 5.0));
  Rng rng(1);
  auto batch = buf.sample_minibatch(1, rng);
  EXPECT_EQ(batch[0].reward, 5.0);
  EXPECT_THROW(buf.sample_minibatch(2, rng), ArenaError);
  for (int i = 0; i < 9; ++i) buf.push(step(3, 8 + i, i));
  Rng a(42), b(42);
  auto sa = buf.sample_minibatch(10, a);
  auto sb = buf.sample_minibatch(10, b);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(sa[i].step_index, sb[i].step_index);
}

TEST(ReplayBuffer, MinibatchFrequencyIsUniform) {
  ReplayBuffer buf(10);
  for (int i = 0; i < 10; ++i) buf.push(step(0, i));
  Rng rng(7);
  std::map<int, int> counts;
  for (int rep = 0; rep < 10000; ++rep) {
    for (const auto& t : buf.sample_minibatch(10, rng)) ++counts[t.step_index];
  }
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(counts[i] / 1e5, 0.1, 0.02 * 0.1) << i;
}

TEST(ReplayBuffer, ChunkStartsWithinEpisode) {
  ReplayBuffer buf(100);
  for (int i = 0; i < 10; ++i) buf.push(step(0, i));
  Rng rng(3);
  for (const Chunk& c : buf.sample_chunks(4, 200, rng)) {
    check_chunk(c, 4);
    EXPECT_GE(c[0].step_index, 0);
    EXPECT_LE(c[0].step_index, 6);
  }
}

TEST(ReplayBuffer, ChunksNeverSpanEpisodes) {
  ReplayBuffer short_eps(100);
  for (int e = 0; e < 2; ++e)
    for (int i = 0; i < 3; ++i) short_eps.push(step(e, i));
  Rng rng(5);
  try {
    short_eps.sample_chunks(4, 1, rng);
    FAIL();
  } catch (const ArenaError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientData);
  }

  ReplayBuffer buf(37);
  for (int e = 0; e < 20; ++e) {
    const int len = 1 + rng.index(9);
    for (int i = 0; i < len; ++i) buf.push(step(e, i));
  }
  for (const Chunk& c : buf.sample_chunks(3, 500, rng)) check_chunk(c, 3);
}

TEST(ReplayBuffer, ChunkCarriesRecordedHiddenState) {
  ReplayBuffer buf(50);
  for (int i = 0; i < 20; ++i) {
    Transition t = step(1, i);
    t.hidden_prev = Vector::Constant(3, 0.01 * i);
    t.context = Vector::Constant(3, 0.01 * (i + 1));
    buf.push(t);
  }
  Rng rng(9);
  for (const Chunk& c : buf.sample_chunks(8, 50, rng)) {
    ASSERT_TRUE(c[0].hidden_prev.has_value());
    EXPECT_EQ(*c[0].hidden_prev, Vector::Constant(3, 0.01 * c[0].step_index));
  }
}

TEST(ReplayBuffer, SamplingDoesNotMutate) {
  ReplayBuffer buf(8);
  for (int i = 0; i < 8; ++i) buf.push(step(0, i, i));
  Rng rng(2);
  buf.sample_minibatch(8, rng);
  buf.sample_chunks(4, 8, rng);
  ASSERT_EQ(buf.size(), 8u);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(buf[i].reward, i);
}

}  // namespace
}  // namespace arena

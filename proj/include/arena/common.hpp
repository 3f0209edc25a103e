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

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace arena {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using State = Eigen::VectorXd;

enum class ErrorCode {
  kNonFiniteEntry,
  kPivotCycleDetected,
  kSizeLimitExceeded,
  kDimensionMismatch,
  kEpisodeFinished,
  kConfigInvalid,
  kActionOutOfRange,
  kTapeMismatch,
  kNonFiniteGradient,
  kIndexOutOfRange,
  kInsufficientData,
  kEmptyTrajectory,
  kUnsupportedEnvironment,
  kMissingRecords,
  kIoFailure,
};

inline std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::kPivotCycleDetected: return "PivotCycleDetected";
    case ErrorCode::kSizeLimitExceeded: return "SizeLimitExceeded";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEpisodeFinished: return "EpisodeFinished";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kActionOutOfRange: return "ActionOutOfRange";
    case ErrorCode::kTapeMismatch: return "TapeMismatch";
    case ErrorCode::kNonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kEmptyTrajectory: return "EmptyTrajectory";
    case ErrorCode::kUnsupportedEnvironment: return "UnsupportedEnvironment";
    case ErrorCode::kMissingRecords: return "MissingRecords";
    case ErrorCode::kIoFailure: return "IoFailure";
  }
  return "Unknown";
}

class ArenaError : public std::runtime_error {
 public:
  ArenaError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// 64-bit split-mix finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Folds a list of integers into one seed; order matters.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p + 0x632BE59BD9B4E019ULL));
  return h;
}

// Seeded generator. Distributions are implemented here rather than through
// <random> distribution objects so streams are identical across standard
// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  void reseed(std::uint64_t seed) { engine_.seed(seed); }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  int index(int n) {
    if (n <= 0) throw ArenaError(ErrorCode::kIndexOutOfRange, "Rng::index with n <= 0");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t draw = engine_();
    while (draw >= limit) draw = engine_();
    return static_cast<int>(draw % bound);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Samples an index from a probability vector (assumed to sum to ~1).
  int categorical(std::span<const double> probs) {
    const double u = uniform();
    double cumulative = 0.0;
    int last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] <= 0.0) continue;
      cumulative += probs[i];
      last_positive = static_cast<int>(i);
      if (u < cumulative) return static_cast<int>(i);
    }
    return last_positive;
  }

  int categorical(const Vector& probs) {
    return categorical(std::span<const double>(probs.data(), static_cast<std::size_t>(probs.size())));
  }

 private:
  std::mt19937_64 engine_;
};

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

// Index of the largest entry, ties to the lowest index.
inline int argmax_lowest(const Vector& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

inline int argmin_lowest(const Vector& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (v[i] < v[best]) best = i;
  }
  return best;
}

}  // namespace arena

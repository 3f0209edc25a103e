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

// Small differentiable stack: dense networks, a GRU cell, Adam, softmax
// log-loss and a finite-difference gradient audit.
//
// Every model keeps its parameters in one flat vector so optimizers, target
// syncs, snapshots and gradient audits all work on plain vectors. Batched
// inputs are column-major: one sample per column.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "arena/common.hpp"
#include "json.hpp"

namespace arena::nn {

enum class Activation { kTanh, kRelu };
enum class OutputKind { kLinear, kSoftmax };

struct DenseNetworkSpec {
  std::vector<int> layer_widths;  // input, hidden..., output
  Activation activation = Activation::kTanh;
  OutputKind output = OutputKind::kLinear;
};

// Column-wise softmax with max subtraction.
inline Matrix softmax_columns(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const double mx = logits.col(c).maxCoeff();
    out.col(c) = (logits.col(c).array() - mx).exp().matrix();
    out.col(c) /= out.col(c).sum();
  }
  return out;
}

inline Vector softmax(const Vector& logits) { return softmax_columns(logits); }

struct DenseTape {
  std::vector<Matrix> activations;  // [0] input, [l + 1] output of layer l
};

// Glorot-uniform weights, zero biases.
inline void glorot_fill(Eigen::Map<Matrix> w, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Eigen::Index j = 0; j < w.cols(); ++j)
    for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = rng.uniform(-limit, limit);
}

class DenseNetwork {
 public:
  DenseNetwork() = default;

  // Zero parameters.
  explicit DenseNetwork(DenseNetworkSpec spec) : spec_(std::move(spec)) {
    if (spec_.layer_widths.size() < 2) {
      throw ArenaError(ErrorCode::kDimensionMismatch, "a network needs input and output widths");
    }
    Eigen::Index total = 0;
    for (std::size_t l = 0; l + 1 < spec_.layer_widths.size(); ++l) {
      const int in = spec_.layer_widths[l];
      const int out = spec_.layer_widths[l + 1];
      if (in < 1 || out < 1) throw ArenaError(ErrorCode::kDimensionMismatch, "layer widths must be positive");
      offsets_.push_back(total);
      total += static_cast<Eigen::Index>(in) * out + out;
    }
    params_ = Vector::Zero(total);
  }

  DenseNetwork(DenseNetworkSpec spec, Rng& rng) : DenseNetwork(std::move(spec)) {
    for (int l = 0; l < layer_count(); ++l) glorot_fill(weight(l), rng);
  }

  const DenseNetworkSpec& spec() const { return spec_; }
  int layer_count() const { return static_cast<int>(offsets_.size()); }
  int input_dim() const { return spec_.layer_widths.front(); }
  int output_dim() const { return spec_.layer_widths.back(); }
  Eigen::Index parameter_count() const { return params_.size(); }

  Vector& parameters() { return params_; }
  const Vector& parameters() const { return params_; }

  Eigen::Map<Matrix> weight(int l) {
    return {params_.data() + offsets_[l], spec_.layer_widths[l + 1], spec_.layer_widths[l]};
  }
  Eigen::Map<const Matrix> weight(int l) const {
    return {params_.data() + offsets_[l], spec_.layer_widths[l + 1], spec_.layer_widths[l]};
  }
  Eigen::Map<Vector> bias(int l) {
    return {params_.data() + offsets_[l] + weight_size(l), spec_.layer_widths[l + 1]};
  }
  Eigen::Map<const Vector> bias(int l) const {
    return {params_.data() + offsets_[l] + weight_size(l), spec_.layer_widths[l + 1]};
  }

  Matrix forward(const Matrix& inputs, DenseTape* tape = nullptr) const {
    if (inputs.rows() != input_dim()) {
      throw ArenaError(ErrorCode::kDimensionMismatch, "network input has the wrong length");
    }
    if (tape) {
      tape->activations.clear();
      tape->activations.push_back(inputs);
    }
    Matrix a = inputs;
    for (int l = 0; l < layer_count(); ++l) {
      Matrix z = weight(l) * a;
      z.colwise() += bias(l);
      if (l + 1 < layer_count()) {
        a = spec_.activation == Activation::kTanh ? Matrix(z.array().tanh()) : Matrix(z.array().max(0.0));
      } else {
        a = spec_.output == OutputKind::kSoftmax ? softmax_columns(z) : std::move(z);
      }
      if (tape) tape->activations.push_back(a);
    }
    return a;
  }

  Vector evaluate(const Vector& input) const { return forward(Matrix(input)).col(0); }

  // Reverse pass for the scalar sum over columns of <output_grad, output>.
  // Parameter gradients are accumulated into `param_grad`; the input
  // gradient is returned.
  Matrix backward(const DenseTape& tape, const Matrix& output_grad, Vector& param_grad) const {
    if (static_cast<int>(tape.activations.size()) != layer_count() + 1 ||
        tape.activations.back().rows() != output_grad.rows() ||
        tape.activations.back().cols() != output_grad.cols() ||
        tape.activations.front().rows() != input_dim()) {
      throw ArenaError(ErrorCode::kTapeMismatch, "tape does not match this network or gradient");
    }
    if (param_grad.size() != parameter_count()) {
      throw ArenaError(ErrorCode::kTapeMismatch, "parameter gradient has the wrong size");
    }
    Matrix delta = output_grad;
    if (spec_.output == OutputKind::kSoftmax) {
      const Matrix& p = tape.activations.back();
      const Eigen::RowVectorXd inner = (p.array() * delta.array()).colwise().sum();
      delta = (p.array() * (delta.rowwise() - inner).array()).matrix();
    }
    for (int l = layer_count() - 1; l >= 0; --l) {
      const Matrix& input = tape.activations[l];
      Eigen::Map<Matrix> gw(param_grad.data() + offsets_[l], spec_.layer_widths[l + 1], spec_.layer_widths[l]);
      Eigen::Map<Vector> gb(param_grad.data() + offsets_[l] + weight_size(l), spec_.layer_widths[l + 1]);
      gw.noalias() += delta * input.transpose();
      gb += delta.rowwise().sum();
      Matrix upstream = weight(l).transpose() * delta;
      if (l > 0) {
        if (spec_.activation == Activation::kTanh) {
          upstream.array() *= 1.0 - input.array().square();
        } else {
          upstream.array() *= (input.array() > 0.0).cast<double>();
        }
      }
      delta = std::move(upstream);
    }
    return delta;
  }

 private:
  Eigen::Index weight_size(int l) const {
    return static_cast<Eigen::Index>(spec_.layer_widths[l]) * spec_.layer_widths[l + 1];
  }

  DenseNetworkSpec spec_;
  std::vector<Eigen::Index> offsets_;
  Vector params_;
};

// Row-major reshape of a flat Q-head into an |A| x |B| matrix.
inline Matrix as_q_matrix(const Vector& flat, int rows, int cols) {
  if (flat.size() != static_cast<Eigen::Index>(rows) * cols) {
    throw ArenaError(ErrorCode::kDimensionMismatch, "Q-head width is not rows * cols");
  }
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), rows, cols);
}

inline Vector flatten_q_matrix(const Matrix& q) {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = q;
  return Eigen::Map<const Vector>(rm.data(), rm.size());
}

struct RecurrentCellSpec {
  int input_dim = 1;
  int hidden_dim = 1;
};

struct GruStepTape {
  Matrix h_prev, x, z, r, candidate;
};

// Gated recurrent unit:
//   z = sigmoid(Wz x + Uz h + bz), r = sigmoid(Wr x + Ur h + br)
//   c = tanh(Wh x + Uh (r * h) + bh), h' = (1 - z) * h + z * c
class GruCell {
 public:
  GruCell() = default;

  explicit GruCell(RecurrentCellSpec spec) : spec_(spec) {
    if (spec.input_dim < 1 || spec.hidden_dim < 1) {
      throw ArenaError(ErrorCode::kDimensionMismatch, "recurrent cell dimensions must be positive");
    }
    const Eigen::Index h = spec.hidden_dim;
    const Eigen::Index i = spec.input_dim;
    block_ = h * i + h * h + h;
    params_ = Vector::Zero(3 * block_);
  }

  GruCell(RecurrentCellSpec spec, Rng& rng) : GruCell(spec) {
    for (int g = 0; g < 3; ++g) {
      glorot_fill(w(g), rng);
      glorot_fill(u(g), rng);
    }
  }

  const RecurrentCellSpec& spec() const { return spec_; }
  Vector& parameters() { return params_; }
  const Vector& parameters() const { return params_; }
  Eigen::Index parameter_count() const { return params_.size(); }

  Matrix forward(const Matrix& h_prev, const Matrix& x, GruStepTape* tape = nullptr) const {
    if (h_prev.rows() != spec_.hidden_dim || x.rows() != spec_.input_dim || h_prev.cols() != x.cols()) {
      throw ArenaError(ErrorCode::kDimensionMismatch, "recurrent input shape mismatch");
    }
    Matrix zp = w(kUpdate) * x + u(kUpdate) * h_prev;
    zp.colwise() += b(kUpdate);
    Matrix rp = w(kReset) * x + u(kReset) * h_prev;
    rp.colwise() += b(kReset);
    const Matrix z = sigmoid(zp);
    const Matrix r = sigmoid(rp);
    Matrix cp = w(kCandidate) * x + u(kCandidate) * (r.array() * h_prev.array()).matrix();
    cp.colwise() += b(kCandidate);
    const Matrix c = cp.array().tanh();
    Matrix h_next = ((1.0 - z.array()) * h_prev.array() + z.array() * c.array()).matrix();
    if (tape) *tape = {h_prev, x, z, r, c};
    return h_next;
  }

  Vector step(const Vector& h_prev, const Vector& x) const {
    return forward(Matrix(h_prev), Matrix(x)).col(0);
  }

  // Backward through one step; accumulates parameter gradients and returns
  // the gradient with respect to h_prev.
  Matrix backward_step(const GruStepTape& t, const Matrix& grad_h_next, Vector& param_grad) const {
    if (grad_h_next.rows() != spec_.hidden_dim || grad_h_next.cols() != t.h_prev.cols()) {
      throw ArenaError(ErrorCode::kTapeMismatch, "recurrent gradient shape mismatch");
    }
    if (param_grad.size() != parameter_count()) {
      throw ArenaError(ErrorCode::kTapeMismatch, "parameter gradient has the wrong size");
    }
    const auto g = grad_h_next.array();
    const Matrix dz_pre = (g * (t.candidate.array() - t.h_prev.array()) * t.z.array() * (1.0 - t.z.array())).matrix();
    const Matrix dc_pre = (g * t.z.array() * (1.0 - t.candidate.array().square())).matrix();
    const Matrix rh = (t.r.array() * t.h_prev.array()).matrix();
    const Matrix d_rh = u(kCandidate).transpose() * dc_pre;
    const Matrix dr_pre = (d_rh.array() * t.h_prev.array() * t.r.array() * (1.0 - t.r.array())).matrix();

    accumulate(param_grad, kUpdate, dz_pre, t.x, t.h_prev);
    accumulate(param_grad, kReset, dr_pre, t.x, t.h_prev);
    accumulate(param_grad, kCandidate, dc_pre, t.x, rh);

    Matrix dh = (g * (1.0 - t.z.array())).matrix();
    dh.array() += d_rh.array() * t.r.array();
    dh.noalias() += u(kUpdate).transpose() * dz_pre;
    dh.noalias() += u(kReset).transpose() * dr_pre;
    return dh;
  }

  // Truncated backpropagation through time over stored step tapes.
  // grad_outputs[t] is the loss gradient with respect to h_t (the output of
  // step t). The gradient reaching the chunk's initial hidden state is
  // dropped; the result holds parameter gradients only.
  Vector backward_through_time(const std::vector<GruStepTape>& tapes,
                               const std::vector<Matrix>& grad_outputs) const {
    if (tapes.size() != grad_outputs.size() || tapes.empty()) {
      throw ArenaError(ErrorCode::kTapeMismatch, "one output gradient per step is required");
    }
    Vector grad = Vector::Zero(parameter_count());
    Matrix carry = Matrix::Zero(spec_.hidden_dim, tapes.front().h_prev.cols());
    for (std::size_t k = tapes.size(); k-- > 0;) {
      if (grad_outputs[k].rows() != carry.rows() || grad_outputs[k].cols() != carry.cols()) {
        throw ArenaError(ErrorCode::kTapeMismatch, "output gradient shape mismatch");
      }
      carry = backward_step(tapes[k], carry + grad_outputs[k], grad);
    }
    return grad;
  }

 private:
  enum Gate { kUpdate = 0, kReset = 1, kCandidate = 2 };

  static Matrix sigmoid(const Matrix& m) { return (1.0 / (1.0 + (-m.array()).exp())).matrix(); }

  Eigen::Index w_offset(int g) const { return g * block_; }
  Eigen::Index u_offset(int g) const { return g * block_ + Eigen::Index{spec_.hidden_dim} * spec_.input_dim; }
  Eigen::Index b_offset(int g) const { return u_offset(g) + Eigen::Index{spec_.hidden_dim} * spec_.hidden_dim; }

  Eigen::Map<Matrix> w(int g) { return {params_.data() + w_offset(g), spec_.hidden_dim, spec_.input_dim}; }
  Eigen::Map<Matrix> u(int g) { return {params_.data() + u_offset(g), spec_.hidden_dim, spec_.hidden_dim}; }
  Eigen::Map<const Matrix> w(int g) const { return {params_.data() + w_offset(g), spec_.hidden_dim, spec_.input_dim}; }
  Eigen::Map<const Matrix> u(int g) const { return {params_.data() + u_offset(g), spec_.hidden_dim, spec_.hidden_dim}; }
  Eigen::Map<const Vector> b(int g) const { return {params_.data() + b_offset(g), spec_.hidden_dim}; }

  void accumulate(Vector& grad, int g, const Matrix& d_pre, const Matrix& x, const Matrix& h) const {
    Eigen::Map<Matrix>(grad.data() + w_offset(g), spec_.hidden_dim, spec_.input_dim).noalias() += d_pre * x.transpose();
    Eigen::Map<Matrix>(grad.data() + u_offset(g), spec_.hidden_dim, spec_.hidden_dim).noalias() += d_pre * h.transpose();
    Eigen::Map<Vector>(grad.data() + b_offset(g), spec_.hidden_dim) += d_pre.rowwise().sum();
  }

  RecurrentCellSpec spec_;
  Eigen::Index block_ = 0;
  Vector params_;
};

struct AdamConfig {
  double learning_rate = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  AdamOptimizer(Eigen::Index size, AdamConfig config)
      : config_(config), first_moment_(Vector::Zero(size)), second_moment_(Vector::Zero(size)) {}

  void step(Vector& params, const Vector& grads) {
    if (params.size() != grads.size() || params.size() != first_moment_.size()) {
      throw ArenaError(ErrorCode::kDimensionMismatch, "optimizer shape mismatch");
    }
    if (!grads.allFinite()) throw ArenaError(ErrorCode::kNonFiniteGradient, "gradient has a non-finite entry");
    ++step_count_;
    first_moment_ = config_.beta1 * first_moment_ + (1.0 - config_.beta1) * grads;
    second_moment_ = config_.beta2 * second_moment_ + (1.0 - config_.beta2) * grads.cwiseAbs2();
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_count_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_count_));
    params.array() -= config_.learning_rate * (first_moment_.array() / c1) /
                      ((second_moment_.array() / c2).sqrt() + config_.epsilon);
  }

  std::int64_t step_count() const { return step_count_; }
  const AdamConfig& config() const { return config_; }
  const Vector& first_moment() const { return first_moment_; }
  const Vector& second_moment() const { return second_moment_; }

 private:
  AdamConfig config_;
  std::int64_t step_count_ = 0;
  Vector first_moment_;
  Vector second_moment_;
};

struct LogLoss {
  double loss = 0.0;
  Vector logit_grad;
};

inline LogLoss softmax_logloss(const Vector& logits, int observed) {
  if (observed < 0 || observed >= logits.size()) {
    throw ArenaError(ErrorCode::kIndexOutOfRange, "observed action outside the logit range");
  }
  if (!logits.allFinite()) throw ArenaError(ErrorCode::kNonFiniteEntry, "non-finite logits");
  const double mx = logits.maxCoeff();
  const double log_norm = mx + std::log((logits.array() - mx).exp().sum());
  LogLoss out;
  out.loss = log_norm - logits[observed];
  out.logit_grad = (logits.array() - log_norm).exp().matrix();
  out.logit_grad[observed] -= 1.0;
  return out;
}

// Scalar objective that optionally reports its analytic gradient.
using Objective = std::function<double(const Vector& params, Vector* grad)>;

inline constexpr double kFiniteDifferenceStep = 1e-5;

// Worst relative error between the analytic gradient and central
// differences over `probe_count` random coordinates.
inline double finite_difference_check(const Objective& f, const Vector& params, int probe_count, Rng& rng) {
  Vector analytic = Vector::Zero(params.size());
  f(params, &analytic);
  std::vector<Eigen::Index> coords(static_cast<std::size_t>(params.size()));
  for (Eigen::Index i = 0; i < params.size(); ++i) coords[static_cast<std::size_t>(i)] = i;
  // Partial Fisher-Yates: a distinct random subset when probe_count < size.
  const std::size_t probes = std::min<std::size_t>(coords.size(), static_cast<std::size_t>(std::max(probe_count, 0)));
  for (std::size_t i = 0; i < probes; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.index(static_cast<int>(coords.size() - i)));
    std::swap(coords[i], coords[j]);
  }
  double worst = 0.0;
  Vector probe = params;
  for (std::size_t k = 0; k < probes; ++k) {
    const Eigen::Index i = coords[k];
    probe[i] = params[i] + kFiniteDifferenceStep;
    const double up = f(probe, nullptr);
    probe[i] = params[i] - kFiniteDifferenceStep;
    const double down = f(probe, nullptr);
    probe[i] = params[i];
    const double numeric = (up - down) / (2.0 * kFiniteDifferenceStep);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

// Parameter snapshot file: an 8-byte little-endian length, a JSON manifest
// of that many bytes, then every block's values as little-endian float64 in
// manifest order.
struct ParameterBlock {
  std::string name;
  std::vector<int> shape;
  Vector values;
};

namespace detail {

inline void put_u64_le(std::ostream& out, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

inline std::uint64_t get_u64_le(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace detail

inline void save_parameters(const std::string& path, const std::vector<ParameterBlock>& blocks) {
  nlohmann::json manifest;
  manifest["format"] = "arena-parameters";
  manifest["version"] = 1;
  manifest["blocks"] = nlohmann::json::array();
  for (const auto& b : blocks) {
    manifest["blocks"].push_back({{"name", b.name}, {"shape", b.shape}, {"count", b.values.size()}});
  }
  const std::string header = manifest.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArenaError(ErrorCode::kIoFailure, "cannot open " + path);
  detail::put_u64_le(out, header.size());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (const auto& b : blocks) {
    for (Eigen::Index i = 0; i < b.values.size(); ++i) {
      std::uint64_t bits = 0;
      const double v = b.values[i];
      std::memcpy(&bits, &v, sizeof bits);
      detail::put_u64_le(out, bits);
    }
  }
  if (!out) throw ArenaError(ErrorCode::kIoFailure, "write failed for " + path);
}

inline std::vector<ParameterBlock> load_parameters(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArenaError(ErrorCode::kIoFailure, "cannot open " + path);
  const std::uint64_t header_size = detail::get_u64_le(in);
  if (!in || header_size > (1u << 26)) throw ArenaError(ErrorCode::kIoFailure, "bad snapshot header in " + path);
  std::string header(header_size, '\0');
  in.read(header.data(), static_cast<std::streamsize>(header_size));
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw ArenaError(ErrorCode::kIoFailure, std::string("bad snapshot manifest: ") + e.what());
  }
  std::vector<ParameterBlock> blocks;
  for (const auto& entry : manifest.at("blocks")) {
    ParameterBlock b;
    b.name = entry.at("name").get<std::string>();
    b.shape = entry.at("shape").get<std::vector<int>>();
    b.values.resize(entry.at("count").get<Eigen::Index>());
    for (Eigen::Index i = 0; i < b.values.size(); ++i) {
      const std::uint64_t bits = detail::get_u64_le(in);
      std::memcpy(&b.values[i], &bits, sizeof bits);
    }
    blocks.push_back(std::move(b));
  }
  if (!in) throw ArenaError(ErrorCode::kIoFailure, "truncated snapshot " + path);
  return blocks;
}

}  // namespace arena::nn

// Copyright 2026 The gnrimpute Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GNR_AUTODIFF_HPP
#define GNR_AUTODIFF_HPP

// Minimal tape-based reverse-mode differentiation over dense row-major
// matrices. A Graph owns every node created while evaluating one expression;
// nodes are appended in evaluation order, so the tape is acyclic and backward()
// is a single reverse sweep.

#include "gnr/rng.hpp"
#include "gnr/tensor.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace gnr::ad {

class Graph;

/// Handle to a node on a Graph. Cheap to copy; valid while the graph lives.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  /// Gradient of the last backward() target w.r.t. this node. Zero-shaped
  /// when the node does not require gradients.
  const Tensor& grad() const;
  bool requires_grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  /// Short tag of the producing operation ("dense", "parameter", ...).
  const char* op() const;

  Graph& graph() const { return *graph_; }
  std::size_t id() const { return id_; }

 private:
  friend class Graph;
  Var(Graph* graph, std::size_t id) : graph_(graph), id_(id) {}

  Graph* graph_ = nullptr;
  std::size_t id_ = 0;
};

class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, Var out, const Tensor& out_grad)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  /// Leaf that never receives a gradient.
  Var constant(Tensor value);
  /// Leaf that accumulates a gradient.
  Var parameter(Tensor value);

  /// Reverse sweep from a 1x1 node, seeding d(target)/d(target) = seed.
  void backward(Var target, double seed = 1.0);

  std::size_t size() const { return nodes_.size(); }

  // Used by operation implementations.
  Var record(Tensor value, std::initializer_list<Var> inputs, const char* op, BackwardFn backward);
  const Tensor& value(Var v) const { return nodes_[v.id_].value; }
  bool requires_grad(Var v) const { return nodes_[v.id_].requires_grad; }
  template <class Expr>
  void accumulate(Var v, const Eigen::MatrixBase<Expr>& contribution) {
    Node& node = nodes_[v.id_];
    if (!node.requires_grad) return;
    if (node.grad.size() == 0) {
      node.grad.noalias() = contribution;
    } else {
      node.grad.noalias() += contribution;
    }
  }

 private:
  friend class Var;
  struct Node {
    Tensor value;
    Tensor grad;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    const char* op = "";
    bool requires_grad = false;
  };
  std::deque<Node> nodes_;
  static const Tensor kEmpty;
};

enum class Activation { tanh, sigmoid, softplus };

/// numpy-style axis: Axis::rows reduces down each column (result 1 x cols),
/// Axis::cols reduces across each row (result rows x 1).
enum class Axis { rows = 0, cols = 1 };

/// input * weights + bias, with bias a 1 x out row broadcast over rows.
Var dense(Var input, Var weights, Var bias);
Var activate(Var input, Activation kind);
/// Elementwise log N(x; mean, std^2). Throws ErrorCode::domain on std <= 0.
Var gaussian_log_density(Var x, Var mean, Var std);
Var gaussian_log_density(const Tensor& x, Var mean, Var std);
/// Elementwise m log p + (1 - m) log(1 - p). Throws ErrorCode::domain unless
/// every p lies in the open unit interval and every m is 0 or 1.
Var bernoulli_log_density(const Tensor& m, Var p);
/// mean + std * noise; noise is data, not a node.
Var reparameterize(Var mean, Var std, const Tensor& noise);
Var log_sum_exp(Var values, Axis axis);

Var add(Var a, Var b);
Var sub(Var a, Var b);
/// Hadamard product.
Var mul(Var a, Var b);
Var mul(Var a, const Tensor& constant);
/// a * x + b elementwise, for scalars a and b.
Var affine(Var x, double a, double b);
Var scale(Var x, double a);
Var clamp(Var x, double lo, double hi);
Var sum(Var x, Axis axis);
Var sum_all(Var x);
Var mean_all(Var x);
/// Row i becomes rows i*times .. i*times+times-1.
Var repeat_rows(Var x, Eigen::Index times);
/// The whole matrix stacked `times` times.
Var tile_rows(Var x, Eigen::Index times);
/// Sums consecutive groups of `group` rows.
Var group_sum_rows(Var x, Eigen::Index group);
Var reshape(Var x, Eigen::Index rows, Eigen::Index cols);
Var concat_cols(Var a, Var b);
/// Multiplies row i by weights(i, 0); weights is data.
Var scale_rows(Var x, const Tensor& weights);

/// Glorot/Xavier uniform on +-sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(Eigen::Index fan_in, Eigen::Index fan_out, SeededRng& rng);

struct AdamState {
  Vector first_moment;
  Vector second_moment;
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_size(std::size_t n);
};

/// One bias-corrected Adam descent step on params. Throws ErrorCode::dimension
/// when params, grads and state lengths disagree.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr);

}  // namespace gnr::ad

#endif  // GNR_AUTODIFF_HPP

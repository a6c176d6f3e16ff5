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

#include "gnr/autodiff.hpp"

#include "gnr/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace gnr::ad {

const Tensor Graph::kEmpty{};

const Tensor& Var::value() const { return graph_->nodes_[id_].value; }

const Tensor& Var::grad() const {
  const auto& node = graph_->nodes_[id_];
  return node.requires_grad ? node.grad : Graph::kEmpty;
}

bool Var::requires_grad() const { return graph_->nodes_[id_].requires_grad; }

const char* Var::op() const { return graph_->nodes_[id_].op; }

Var Graph::constant(Tensor value) {
  Node& node = nodes_.emplace_back();
  node.value = std::move(value);
  node.op = "constant";
  return Var(this, nodes_.size() - 1);
}

Var Graph::parameter(Tensor value) {
  Node& node = nodes_.emplace_back();
  node.value = std::move(value);
  node.op = "parameter";
  node.requires_grad = true;
  return Var(this, nodes_.size() - 1);
}

Var Graph::record(Tensor value, std::initializer_list<Var> inputs, const char* op, BackwardFn backward) {
  Node& node = nodes_.emplace_back();
  node.value = std::move(value);
  node.op = op;
  for (const Var& in : inputs) {
    node.inputs.push_back(in.id_);
    node.requires_grad = node.requires_grad || nodes_[in.id_].requires_grad;
  }
  if (node.requires_grad) node.backward = std::move(backward);
  return Var(this, nodes_.size() - 1);
}

void Graph::backward(Var target, double seed) {
  require(target.graph_ == this, ErrorCode::invalid_argument, "backward target belongs to another graph");
  require(value(target).rows() == 1 && value(target).cols() == 1, ErrorCode::dimension,
          "backward target must be 1x1");
  for (Node& node : nodes_) node.grad.resize(0, 0);
  Node& root = nodes_[target.id_];
  if (!root.requires_grad) return;
  root.grad = Tensor::Constant(1, 1, seed);
  for (std::size_t i = target.id_ + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.requires_grad || node.grad.size() == 0 || !node.backward) continue;
    node.backward(*this, Var(this, i), node.grad);
  }
  // Leaves that were never reached still expose a zero gradient.
  for (Node& node : nodes_) {
    if (node.requires_grad && node.grad.size() == 0) node.grad = Tensor::Zero(node.value.rows(), node.value.cols());
  }
}

namespace {

void same_shape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorCode::dimension, std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                                   std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                   std::to_string(b.cols()));
  }
}

void same_shape(const Var& a, const Tensor& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) fail(ErrorCode::dimension, std::string(op) + ": shape mismatch");
}

Graph& graph_of(const Var& a, const Var& b) {
  require(&a.graph() == &b.graph(), ErrorCode::invalid_argument, "operands belong to different graphs");
  return a.graph();
}

constexpr double kHalfLog2Pi = 0.91893853320467274178;

}  // namespace

Var dense(Var input, Var weights, Var bias) {
  Graph& g = graph_of(input, weights);
  graph_of(weights, bias);
  if (input.cols() != weights.rows()) fail(ErrorCode::dimension, "dense: input cols must equal weight rows");
  if (bias.rows() != 1 || bias.cols() != weights.cols()) fail(ErrorCode::dimension, "dense: bias must be 1 x out");
  Tensor out(input.rows(), weights.cols());
  out.noalias() = input.value() * weights.value();
  out.rowwise() += bias.value().row(0);
  return g.record(std::move(out), {input, weights, bias}, "dense", [input, weights, bias](Graph& g, Var, const Tensor& dy) {
    if (input.requires_grad()) g.accumulate(input, dy * weights.value().transpose());
    if (weights.requires_grad()) g.accumulate(weights, input.value().transpose() * dy);
    if (bias.requires_grad()) g.accumulate(bias, dy.colwise().sum());
  });
}

Var activate(Var input, Activation kind) {
  Graph& g = input.graph();
  const auto x = input.value().array();
  switch (kind) {
    case Activation::tanh: {
      // 1 - 2 / (exp(2x) + 1) vectorizes; Eigen's tanh for doubles is scalar.
      Tensor out = (1.0 - 2.0 / ((2.0 * x).exp() + 1.0)).matrix();
      return g.record(std::move(out), {input}, "tanh", [input](Graph& g, Var self, const Tensor& dy) {
        const auto y = self.value().array();
        g.accumulate(input, (dy.array() * (1.0 - y.square())).matrix());
      });
    }
    case Activation::sigmoid: {
      Tensor out = (1.0 / (1.0 + (-x).exp())).matrix();
      return g.record(std::move(out), {input}, "sigmoid", [input](Graph& g, Var self, const Tensor& dy) {
        const auto y = self.value().array();
        g.accumulate(input, (dy.array() * y * (1.0 - y)).matrix());
      });
    }
    case Activation::softplus: {
      Tensor out = (x.max(0.0) + (-x.abs()).exp().log1p()).matrix();
      return g.record(std::move(out), {input}, "softplus", [input](Graph& g, Var, const Tensor& dy) {
        const auto z = input.value().array();
        g.accumulate(input, (dy.array() / (1.0 + (-z).exp())).matrix());
      });
    }
  }
  fail(ErrorCode::invalid_argument, "activate: unknown activation");
}

Var gaussian_log_density(Var x, Var mean, Var std) {
  Graph& g = graph_of(x, mean);
  graph_of(mean, std);
  same_shape(x, mean, "gaussian_log_density");
  same_shape(mean, std, "gaussian_log_density");
  if (!(std.value().array() > 0.0).all()) fail(ErrorCode::domain, "gaussian_log_density: std must be strictly positive");
  const auto s = std.value().array();
  const auto r = (x.value().array() - mean.value().array()) / s;
  Tensor out = (-0.5 * r.square() - s.log() - kHalfLog2Pi).matrix();
  return g.record(std::move(out), {x, mean, std}, "gaussian_log_density",
                  [x, mean, std](Graph& g, Var, const Tensor& dy) {
                    const auto s = std.value().array();
                    const auto diff = x.value().array() - mean.value().array();
                    const auto d_mean = (dy.array() * diff / s.square()).matrix();
                    if (mean.requires_grad()) g.accumulate(mean, d_mean);
                    if (x.requires_grad()) g.accumulate(x, -d_mean);
                    if (std.requires_grad())
                      g.accumulate(std, (dy.array() * (diff.square() / (s * s * s) - 1.0 / s)).matrix());
                  });
}

Var gaussian_log_density(const Tensor& x, Var mean, Var std) {
  return gaussian_log_density(mean.graph().constant(x), mean, std);
}

Var bernoulli_log_density(const Tensor& m, Var p) {
  Graph& g = p.graph();
  same_shape(p, m, "bernoulli_log_density");
  const auto pa = p.value().array();
  if (!((pa > 0.0) && (pa < 1.0)).all())
    fail(ErrorCode::domain, "bernoulli_log_density: probabilities must lie in (0, 1)");
  if (!((m.array() == 0.0) || (m.array() == 1.0)).all())
    fail(ErrorCode::domain, "bernoulli_log_density: mask entries must be 0 or 1");
  Tensor out = (m.array() * pa.log() + (1.0 - m.array()) * (1.0 - pa).log()).matrix();
  Var mask = g.constant(m);
  return g.record(std::move(out), {p, mask}, "bernoulli_log_density", [p, mask](Graph& g, Var, const Tensor& dy) {
    const auto pa = p.value().array();
    const auto ma = mask.value().array();
    g.accumulate(p, (dy.array() * (ma / pa - (1.0 - ma) / (1.0 - pa))).matrix());
  });
}

Var reparameterize(Var mean, Var std, const Tensor& noise) {
  Graph& g = graph_of(mean, std);
  same_shape(mean, std, "reparameterize");
  same_shape(mean, noise, "reparameterize");
  Tensor out = (mean.value().array() + std.value().array() * noise.array()).matrix();
  Var eps = g.constant(noise);
  return g.record(std::move(out), {mean, std, eps}, "reparameterize", [mean, std, eps](Graph& g, Var, const Tensor& dy) {
    if (mean.requires_grad()) g.accumulate(mean, dy);
    if (std.requires_grad()) g.accumulate(std, (dy.array() * eps.value().array()).matrix());
  });
}

Var log_sum_exp(Var values, Axis axis) {
  Graph& g = values.graph();
  const Tensor& v = values.value();
  if (axis == Axis::cols) {
    if (v.cols() == 0) fail(ErrorCode::dimension, "log_sum_exp: empty axis");
    Tensor out(v.rows(), 1);
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      const double mx = v.row(i).maxCoeff();
      out(i, 0) = std::isfinite(mx) ? mx + std::log((v.row(i).array() - mx).exp().sum()) : mx;
    }
    return g.record(std::move(out), {values}, "log_sum_exp", [values](Graph& g, Var self, const Tensor& dy) {
      const Tensor& v = values.value();
      Tensor d(v.rows(), v.cols());
      for (Eigen::Index i = 0; i < v.rows(); ++i)
        d.row(i) = (v.row(i).array() - self.value()(i, 0)).exp() * dy(i, 0);
      g.accumulate(values, d);
    });
  }
  if (v.rows() == 0) fail(ErrorCode::dimension, "log_sum_exp: empty axis");
  Tensor out(1, v.cols());
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    const double mx = v.col(j).maxCoeff();
    out(0, j) = std::isfinite(mx) ? mx + std::log((v.col(j).array() - mx).exp().sum()) : mx;
  }
  return g.record(std::move(out), {values}, "log_sum_exp", [values](Graph& g, Var self, const Tensor& dy) {
    const Tensor& v = values.value();
    Tensor d(v.rows(), v.cols());
    for (Eigen::Index j = 0; j < v.cols(); ++j)
      d.col(j) = (v.col(j).array() - self.value()(0, j)).exp() * dy(0, j);
    g.accumulate(values, d);
  });
}

Var add(Var a, Var b) {
  Graph& g = graph_of(a, b);
  same_shape(a, b, "add");
  return g.record(a.value() + b.value(), {a, b}, "add", [a, b](Graph& g, Var, const Tensor& dy) {
    g.accumulate(a, dy);
    g.accumulate(b, dy);
  });
}

Var sub(Var a, Var b) {
  Graph& g = graph_of(a, b);
  same_shape(a, b, "sub");
  return g.record(a.value() - b.value(), {a, b}, "sub", [a, b](Graph& g, Var, const Tensor& dy) {
    g.accumulate(a, dy);
    g.accumulate(b, -dy);
  });
}

Var mul(Var a, Var b) {
  Graph& g = graph_of(a, b);
  same_shape(a, b, "mul");
  return g.record(a.value().cwiseProduct(b.value()), {a, b}, "mul", [a, b](Graph& g, Var, const Tensor& dy) {
    if (a.requires_grad()) g.accumulate(a, dy.cwiseProduct(b.value()));
    if (b.requires_grad()) g.accumulate(b, dy.cwiseProduct(a.value()));
  });
}

Var mul(Var a, const Tensor& constant) { return mul(a, a.graph().constant(constant)); }

Var affine(Var x, double a, double b) {
  Graph& g = x.graph();
  Tensor out = (a * x.value().array() + b).matrix();
  return g.record(std::move(out), {x}, "affine", [x, a](Graph& g, Var, const Tensor& dy) { g.accumulate(x, a * dy); });
}

Var scale(Var x, double a) { return affine(x, a, 0.0); }

Var clamp(Var x, double lo, double hi) {
  Graph& g = x.graph();
  Tensor out = x.value().cwiseMax(lo).cwiseMin(hi);
  return g.record(std::move(out), {x}, "clamp", [x, lo, hi](Graph& g, Var, const Tensor& dy) {
    const auto v = x.value().array();
    g.accumulate(x, ((v >= lo) && (v <= hi)).select(dy.array(), 0.0).matrix());
  });
}

Var sum(Var x, Axis axis) {
  Graph& g = x.graph();
  if (axis == Axis::cols) {
    Tensor out = x.value().rowwise().sum();
    return g.record(std::move(out), {x}, "sum", [x](Graph& g, Var, const Tensor& dy) {
      g.accumulate(x, dy.col(0).replicate(1, x.cols()));
    });
  }
  Tensor out = x.value().colwise().sum();
  return g.record(std::move(out), {x}, "sum", [x](Graph& g, Var, const Tensor& dy) {
    g.accumulate(x, dy.row(0).replicate(x.rows(), 1));
  });
}

Var sum_all(Var x) {
  Graph& g = x.graph();
  Tensor out = Tensor::Constant(1, 1, x.value().sum());
  return g.record(std::move(out), {x}, "sum_all", [x](Graph& g, Var, const Tensor& dy) {
    g.accumulate(x, Tensor::Constant(x.rows(), x.cols(), dy(0, 0)));
  });
}

Var mean_all(Var x) {
  if (x.value().size() == 0) fail(ErrorCode::dimension, "mean_all: empty tensor");
  return scale(sum_all(x), 1.0 / static_cast<double>(x.value().size()));
}

Var repeat_rows(Var x, Eigen::Index times) {
  require(times >= 1, ErrorCode::dimension, "repeat_rows: times must be >= 1");
  Graph& g = x.graph();
  const Tensor& v = x.value();
  Tensor out(v.rows() * times, v.cols());
  for (Eigen::Index i = 0; i < v.rows(); ++i) out.middleRows(i * times, times) = v.row(i).replicate(times, 1);
  return g.record(std::move(out), {x}, "repeat_rows", [x, times](Graph& g, Var, const Tensor& dy) {
    Tensor d(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) d.row(i) = dy.middleRows(i * times, times).colwise().sum();
    g.accumulate(x, d);
  });
}

Var tile_rows(Var x, Eigen::Index times) {
  require(times >= 1, ErrorCode::dimension, "tile_rows: times must be >= 1");
  Graph& g = x.graph();
  Tensor out = x.value().replicate(times, 1);
  return g.record(std::move(out), {x}, "tile_rows", [x, times](Graph& g, Var, const Tensor& dy) {
    Tensor d = Tensor::Zero(x.rows(), x.cols());
    for (Eigen::Index t = 0; t < times; ++t) d += dy.middleRows(t * x.rows(), x.rows());
    g.accumulate(x, d);
  });
}

Var group_sum_rows(Var x, Eigen::Index group) {
  require(group >= 1 && x.rows() % group == 0, ErrorCode::dimension, "group_sum_rows: rows must divide into groups");
  Graph& g = x.graph();
  const Eigen::Index groups = x.rows() / group;
  Tensor out(groups, x.cols());
  for (Eigen::Index i = 0; i < groups; ++i) out.row(i) = x.value().middleRows(i * group, group).colwise().sum();
  return g.record(std::move(out), {x}, "group_sum_rows", [x, group](Graph& g, Var, const Tensor& dy) {
    Tensor d(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < dy.rows(); ++i) d.middleRows(i * group, group) = dy.row(i).replicate(group, 1);
    g.accumulate(x, d);
  });
}

Var reshape(Var x, Eigen::Index rows, Eigen::Index cols) {
  if (rows * cols != x.value().size()) fail(ErrorCode::dimension, "reshape: element count mismatch");
  Graph& g = x.graph();
  Tensor out = Eigen::Map<const Tensor>(x.value().data(), rows, cols);
  return g.record(std::move(out), {x}, "reshape", [x](Graph& g, Var, const Tensor& dy) {
    g.accumulate(x, Eigen::Map<const Tensor>(dy.data(), x.rows(), x.cols()));
  });
}

Var concat_cols(Var a, Var b) {
  Graph& g = graph_of(a, b);
  if (a.rows() != b.rows()) fail(ErrorCode::dimension, "concat_cols: row counts differ");
  Tensor out(a.rows(), a.cols() + b.cols());
  out.leftCols(a.cols()) = a.value();
  out.rightCols(b.cols()) = b.value();
  return g.record(std::move(out), {a, b}, "concat_cols", [a, b](Graph& g, Var, const Tensor& dy) {
    if (a.requires_grad()) g.accumulate(a, dy.leftCols(a.cols()));
    if (b.requires_grad()) g.accumulate(b, dy.rightCols(b.cols()));
  });
}

Var scale_rows(Var x, const Tensor& weights) {
  if (weights.rows() != x.rows() || weights.cols() != 1) fail(ErrorCode::dimension, "scale_rows: weights must be rows x 1");
  Graph& g = x.graph();
  Var w = g.constant(weights);
  Tensor out = x.value().array().colwise() * weights.col(0).array();
  return g.record(std::move(out), {x, w}, "scale_rows", [x, w](Graph& g, Var, const Tensor& dy) {
    g.accumulate(x, (dy.array().colwise() * w.value().col(0).array()).matrix());
  });
}

Tensor glorot_uniform(Eigen::Index fan_in, Eigen::Index fan_out, SeededRng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor w(fan_in, fan_out);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = limit * (2.0 * rng.uniform() - 1.0);
  return w;
}

AdamState AdamState::for_size(std::size_t n) {
  AdamState state;
  state.first_moment = Vector::Zero(static_cast<Eigen::Index>(n));
  state.second_moment = Vector::Zero(static_cast<Eigen::Index>(n));
  return state;
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr) {
  const auto n = static_cast<Eigen::Index>(params.size());
  if (static_cast<Eigen::Index>(grads.size()) != n || state.first_moment.size() != n || state.second_moment.size() != n)
    fail(ErrorCode::dimension, "adam_step: params, grads and state lengths differ");
  ++state.step;
  const double correction1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  Eigen::Map<Vector> p(params.data(), n);
  Eigen::Map<const Vector> gr(grads.data(), n);
  state.first_moment = state.beta1 * state.first_moment + (1.0 - state.beta1) * gr;
  state.second_moment = state.beta2 * state.second_moment + (1.0 - state.beta2) * gr.cwiseProduct(gr);
  p.array() -= lr * (state.first_moment.array() / correction1) /
               ((state.second_moment.array() / correction2).sqrt() + state.epsilon);
}

}  // namespace gnr::ad

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

#include "support/fd_oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace gnr {
namespace {

using ad::Activation;
using ad::Axis;
using ad::Graph;
using ad::Var;

Tensor mat(std::initializer_list<std::initializer_list<double>> rows) {
  Tensor t(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (const double v : r) t(i, j++) = v;
    ++i;
  }
  return t;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::io;
}

TEST(Dense, IdentityWeights) {
  Graph g;
  const Var y = ad::dense(g.constant(mat({{1, 2}})), g.constant(mat({{1, 0}, {0, 1}})), g.constant(mat({{0, 0}})));
  EXPECT_EQ(y.value(), mat({{1, 2}}));
}

TEST(Dense, ZeroInputPassesBias) {
  Graph g;
  const Var y = ad::dense(g.constant(mat({{0, 0}})), g.constant(mat({{5, -1}, {2, 7}})), g.constant(mat({{3, 4}})));
  EXPECT_EQ(y.value(), mat({{3, 4}}));
}

TEST(Dense, ShapeMismatch) {
  Graph g;
  EXPECT_EQ(code_of([&] { ad::dense(g.constant(Tensor::Ones(1, 3)), g.constant(Tensor::Ones(2, 2)), g.constant(Tensor::Ones(1, 2))); }),
            ErrorCode::dimension);
  EXPECT_EQ(code_of([&] { ad::dense(g.constant(Tensor::Ones(1, 2)), g.constant(Tensor::Ones(2, 2)), g.constant(Tensor::Ones(1, 3))); }),
            ErrorCode::dimension);
}

TEST(Dense, WeightGradientOfSumMatchesFiniteDifferences) {
  SeededRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor x = rng.normal_tensor(3, 4);
    const Tensor w = rng.normal_tensor(4, 2);
    const Tensor b = rng.normal_tensor(1, 2);
    Graph g;
    const Var wv = g.parameter(w);
    g.backward(ad::sum_all(ad::dense(g.constant(x), wv, g.constant(b))));
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      Tensor up = w, down = w;
      up.data()[i] += h;
      down.data()[i] -= h;
      const double numeric = ((x * up).sum() - (x * down).sum()) / (2 * h);
      EXPECT_NEAR(wv.grad().data()[i], numeric, 1e-5 * std::max(1.0, std::abs(numeric)));
    }
  }
}

TEST(Activate, ClosedForms) {
  Graph g;
  const Var zero = g.constant(Tensor::Zero(1, 1));
  EXPECT_EQ(ad::activate(zero, Activation::tanh).value()(0, 0), 0.0);
  EXPECT_EQ(ad::activate(zero, Activation::sigmoid).value()(0, 0), 0.5);
  EXPECT_NEAR(ad::activate(zero, Activation::softplus).value()(0, 0), std::log(2.0), 1e-15);
}

TEST(Activate, RangesHoldAtExtremes) {
  Graph g;
  const Var x = g.constant(mat({{-700, -30, 30, 700}}));
  const Tensor s = ad::activate(x, Activation::sigmoid).value();
  const Tensor sp = ad::activate(x, Activation::softplus).value();
  const Tensor t = ad::activate(x, Activation::tanh).value();
  EXPECT_TRUE(((s.array() >= 0.0) && (s.array() <= 1.0)).all());
  EXPECT_TRUE((sp.array() > 0.0).all());
  EXPECT_TRUE(((t.array() >= -1.0) && (t.array() <= 1.0)).all());
  EXPECT_TRUE(all_finite(s) && all_finite(sp) && all_finite(t));
}

TEST(Activate, TanhMatchesStdTanh) {
  SeededRng rng(3);
  const Tensor x = rng.normal_tensor(50, 7) * 4.0;
  Graph g;
  const Tensor y = ad::activate(g.constant(x), Activation::tanh).value();
  for (Eigen::Index i = 0; i < x.size(); ++i) EXPECT_NEAR(y.data()[i], std::tanh(x.data()[i]), 1e-15);
}

TEST(GaussianLogDensity, StandardNormalAtMode) {
  Graph g;
  const Var y = ad::gaussian_log_density(Tensor::Zero(1, 1), g.constant(Tensor::Zero(1, 1)), g.constant(Tensor::Ones(1, 1)));
  EXPECT_NEAR(y.value()(0, 0), -0.5 * std::log(2 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(y.value()(0, 0), -0.9189, 1e-4);
}

TEST(GaussianLogDensity, AtModeWithScale) {
  Graph g;
  const double s = 2.5;
  const Var y = ad::gaussian_log_density(Tensor::Constant(1, 1, 1.3), g.constant(Tensor::Constant(1, 1, 1.3)),
                                         g.constant(Tensor::Constant(1, 1, s)));
  EXPECT_NEAR(y.value()(0, 0), -std::log(s) - 0.5 * std::log(2 * std::numbers::pi), 1e-15);
}

TEST(GaussianLogDensity, NonPositiveStdIsDomainError) {
  Graph g;
  EXPECT_EQ(code_of([&] { ad::gaussian_log_density(Tensor::Zero(1, 2), g.constant(Tensor::Zero(1, 2)), g.constant(mat({{1, 0}}))); }),
            ErrorCode::domain);
  EXPECT_EQ(code_of([&] { ad::gaussian_log_density(Tensor::Zero(1, 1), g.constant(Tensor::Zero(1, 1)), g.constant(mat({{-1}}))); }),
            ErrorCode::domain);
}

TEST(GaussianLogDensity, MeanGradientMatchesFiniteDifferences) {
  SeededRng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor x = rng.normal_tensor(2, 3);
    const Tensor mu = rng.normal_tensor(2, 3);
    const Tensor s = (rng.normal_tensor(2, 3).array().abs() + 0.5).matrix();
    Graph g;
    const Var m = g.parameter(mu);
    g.backward(ad::sum_all(ad::gaussian_log_density(x, m, g.constant(s))));
    const auto f = [&](const Tensor& mean) {
      return (-0.5 * ((x - mean).array() / s.array()).square() - s.array().log() - 0.5 * std::log(2 * std::numbers::pi)).sum();
    };
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      Tensor up = mu, down = mu;
      up.data()[i] += h;
      down.data()[i] -= h;
      const double numeric = (f(up) - f(down)) / (2 * h);
      EXPECT_NEAR(m.grad().data()[i], numeric, 1e-5 * std::max(1.0, std::abs(numeric)));
    }
  }
}

TEST(BernoulliLogDensity, ClosedForms) {
  Graph g;
  const Var p = g.constant(Tensor::Constant(1, 2, 0.5));
  const Tensor y = ad::bernoulli_log_density(mat({{1, 0}}), p).value();
  EXPECT_NEAR(y(0, 0), std::log(0.5), 1e-15);
  EXPECT_NEAR(y(0, 1), std::log(0.5), 1e-15);
}

TEST(BernoulliLogDensity, DomainErrors) {
  Graph g;
  EXPECT_EQ(code_of([&] { ad::bernoulli_log_density(mat({{1}}), g.constant(mat({{0.0}}))); }), ErrorCode::domain);
  EXPECT_EQ(code_of([&] { ad::bernoulli_log_density(mat({{1}}), g.constant(mat({{1.0}}))); }), ErrorCode::domain);
  EXPECT_EQ(code_of([&] { ad::bernoulli_log_density(mat({{0.5}}), g.constant(mat({{0.3}}))); }), ErrorCode::domain);
}

TEST(BernoulliLogDensity, LogitGradientMatchesFiniteDifferences) {
  SeededRng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor logit = rng.normal_tensor(3, 2) * 2.0;
    Tensor m(3, 2);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.bernoulli(0.5) ? 1 : 0;
    Graph g;
    const Var l = g.parameter(logit);
    g.backward(ad::sum_all(ad::bernoulli_log_density(m, ad::activate(l, Activation::sigmoid))));
    const auto f = [&](const Tensor& a) {
      const auto p = 1.0 / (1.0 + (-a.array()).exp());
      return (m.array() * p.log() + (1.0 - m.array()) * (1.0 - p).log()).sum();
    };
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < logit.size(); ++i) {
      Tensor up = logit, down = logit;
      up.data()[i] += h;
      down.data()[i] -= h;
      const double numeric = (f(up) - f(down)) / (2 * h);
      EXPECT_NEAR(l.grad().data()[i], numeric, 1e-5 * std::max(1.0, std::abs(numeric)));
    }
  }
}

TEST(Reparameterize, ClosedForms) {
  SeededRng rng(1);
  const Tensor mean = rng.normal_tensor(3, 2);
  const Tensor std = (rng.normal_tensor(3, 2).array().abs() + 0.1).matrix();
  const Tensor noise = rng.normal_tensor(3, 2);
  Graph g;
  EXPECT_EQ(ad::reparameterize(g.constant(mean), g.constant(std), Tensor::Zero(3, 2)).value(), mean);
  EXPECT_EQ(ad::reparameterize(g.constant(Tensor::Zero(3, 2)), g.constant(Tensor::Ones(3, 2)), noise).value(), noise);
  const Var s = g.parameter(std);
  g.backward(ad::sum_all(ad::reparameterize(g.constant(mean), s, noise)));
  EXPECT_EQ(s.grad(), noise);
}

TEST(Reparameterize, ShapeMismatch) {
  Graph g;
  EXPECT_EQ(code_of([&] { ad::reparameterize(g.constant(Tensor::Zero(2, 1)), g.constant(Tensor::Ones(2, 1)), Tensor::Zero(3, 1)); }),
            ErrorCode::dimension);
}

TEST(LogSumExp, ClosedForms) {
  Graph g;
  EXPECT_NEAR(ad::log_sum_exp(g.constant(mat({{0, 0}})), Axis::cols).value()(0, 0), std::log(2.0), 1e-15);
  EXPECT_EQ(ad::log_sum_exp(g.constant(mat({{-3.25}})), Axis::cols).value()(0, 0), -3.25);
  const double big = ad::log_sum_exp(g.constant(mat({{1000, 1000}})), Axis::cols).value()(0, 0);
  EXPECT_TRUE(std::isfinite(big));
  EXPECT_NEAR(big, 1000 + std::log(2.0), 1e-12);
  EXPECT_EQ(code_of([&] { ad::log_sum_exp(g.constant(Tensor(2, 0)), Axis::cols); }), ErrorCode::dimension);
}

TEST(LogSumExp, BoundedByMaxAndMaxPlusLogLength) {
  SeededRng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = 1 + static_cast<Eigen::Index>(rng.index(30));
    const Tensor v = rng.normal_tensor(1, n) * 300.0;
    Graph g;
    const double lse = ad::log_sum_exp(g.constant(v), Axis::cols).value()(0, 0);
    EXPECT_GE(lse, v.maxCoeff());
    EXPECT_LE(lse, v.maxCoeff() + std::log(static_cast<double>(n)) + 1e-12);
  }
}

TEST(Backward, UnreachedLeavesHaveZeroGradient) {
  Graph g;
  const Var a = g.parameter(Tensor::Ones(2, 2));
  const Var b = g.parameter(Tensor::Ones(3, 1));
  g.backward(ad::sum_all(a));
  EXPECT_EQ(b.grad(), Tensor::Zero(3, 1));
  EXPECT_EQ(a.grad(), Tensor::Ones(2, 2));
}

TEST(Backward, ConstantsHaveNoGradient) {
  Graph g;
  const Var c = g.constant(Tensor::Ones(2, 2));
  const Var p = g.parameter(Tensor::Ones(2, 2));
  g.backward(ad::sum_all(ad::mul(c, p)));
  EXPECT_EQ(c.grad().size(), 0);
  EXPECT_EQ(p.grad(), Tensor::Ones(2, 2));
}

TEST(Backward, RepeatedBackwardDoesNotAccumulate) {
  Graph g;
  const Var p = g.parameter(mat({{2.0}}));
  const Var y = ad::sum_all(ad::mul(p, p));
  g.backward(y);
  g.backward(y);
  EXPECT_EQ(p.grad()(0, 0), 4.0);
}

TEST(Backward, TargetMustBeScalar) {
  Graph g;
  const Var p = g.parameter(Tensor::Ones(2, 1));
  EXPECT_EQ(code_of([&] { g.backward(p); }), ErrorCode::dimension);
}

TEST(FiniteDifferences, EveryPrimitiveOnHundredRandomInstances) {
  for (const auto& c : testing::primitive_cases()) {
    const auto result = testing::check_case(c, 100, 1e-4, 2026);
    EXPECT_EQ(result.passed, result.instances) << c.name << " worst relative error " << result.worst;
  }
}

TEST(Glorot, WithinLimitAndDeterministic) {
  SeededRng a(4), b(4);
  const Tensor w = ad::glorot_uniform(10, 6, a);
  EXPECT_EQ(w, ad::glorot_uniform(10, 6, b));
  const double limit = std::sqrt(6.0 / 16.0);
  EXPECT_LE(w.cwiseAbs().maxCoeff(), limit);
  EXPECT_EQ(w.rows(), 10);
  EXPECT_EQ(w.cols(), 6);
}

TEST(Adam, ZeroGradientLeavesParamsAndCountsStep) {
  std::vector<double> params{1.0, -2.0, 3.0};
  const std::vector<double> grads(3, 0.0);
  auto state = ad::AdamState::for_size(3);
  ad::adam_step(params, grads, state, 1e-3);
  EXPECT_EQ(params, (std::vector<double>{1.0, -2.0, 3.0}));
  EXPECT_EQ(state.step, 1);
}

TEST(Adam, FirstStepMovesByLearningRateTimesSign) {
  // t = 1: m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps).
  std::vector<double> params{0.0, 0.0, 0.0, 0.0};
  const std::vector<double> grads{0.5, -3.0, 1e-2, -40.0};
  auto state = ad::AdamState::for_size(4);
  const double lr = 1e-3;
  ad::adam_step(params, grads, state, lr);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double expected = -lr * grads[i] / (std::abs(grads[i]) + 1e-8);
    EXPECT_NEAR(params[i], expected, 1e-15);
    EXPECT_NEAR(std::abs(params[i]), lr, 1e-8);
  }
}

TEST(Adam, DeterministicAndLengthChecked) {
  std::vector<double> p1{1, 2}, p2{1, 2};
  const std::vector<double> g{0.3, -0.7};
  auto s1 = ad::AdamState::for_size(2), s2 = ad::AdamState::for_size(2);
  for (int i = 0; i < 5; ++i) {
    ad::adam_step(p1, g, s1, 1e-2);
    ad::adam_step(p2, g, s2, 1e-2);
  }
  EXPECT_EQ(p1, p2);
  std::vector<double> short_grads{1.0};
  EXPECT_EQ(code_of([&] { ad::adam_step(p1, short_grads, s1, 1e-3); }), ErrorCode::dimension);
}

}  // namespace
}  // namespace gnr

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

#include "gnr/error.hpp"
#include "gnr/mask_synth.hpp"
#include "gnr/missing.hpp"
#include "gnr/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

namespace gnr {
namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::io;
}

Mask random_mask(SeededRng& rng, Eigen::Index n, Eigen::Index d, double p = 0.5) {
  Mask m(n, d, true);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m.set(i, j, !rng.bernoulli(p));
  return m;
}

double missing_fraction(const Mask& m) { return static_cast<double>(m.count_missing()) / static_cast<double>(m.bits().size()); }

// -- rng ----------------------------------------------------------------------

TEST(Rng, SameSeedSameStream) {
  SeededRng a(123), b(123), c(124);
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    EXPECT_EQ(va, b.next_u64());
    EXPECT_NE(va, c.next_u64());
  }
}

TEST(Rng, SubstreamsAreDistinctAndStable) {
  const SeededRng root(5);
  EXPECT_EQ(root.substream("mask").next_u64(), root.substream("mask").next_u64());
  EXPECT_NE(root.substream("mask").next_u64(), root.substream("data").next_u64());
  EXPECT_NE(root.substream(0).next_u64(), root.substream(1).next_u64());
  SeededRng advanced = root;
  advanced.next_u64();
  EXPECT_EQ(advanced.substream(7).next_u64(), root.substream(7).next_u64());
}

TEST(Rng, UniformAndNormalMoments) {
  SeededRng rng(9);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(sn / n, 0.0, 4 / std::sqrt(n));
  EXPECT_NEAR(sn2 / n, 1.0, 4 * std::sqrt(2.0 / n));
}

TEST(Rng, IndexIsInRangeAndCoversAll) {
  SeededRng rng(10);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto v = rng.index(7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
  EXPECT_THROW(rng.index(0), Error);
}

TEST(Rng, ShuffleIsPermutation) {
  SeededRng rng(11);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  rng.shuffle(std::span<int>(v));
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

// -- missing-core ---------------------------------------------------------------

TEST(Compose, ObservedExample) {
  const Tensor x = (Tensor(1, 2) << 1, 2).finished();
  Mask m(1, 2, true);
  m.set(0, 1, false);
  const IncompleteMatrix obs = compose_observed(x, m);
  EXPECT_EQ(obs.value(0, 0), 1.0);
  EXPECT_EQ(code_of([&] { obs.value(0, 1); }), ErrorCode::invalid_argument);
  EXPECT_EQ(obs.mask(), m);
  const IncompleteMatrix mis = compose_missing(x, m);
  EXPECT_EQ(mis.value(0, 1), 2.0);
  EXPECT_EQ(code_of([&] { mis.value(0, 0); }), ErrorCode::invalid_argument);
}

TEST(Compose, FullAndEmptyMasks) {
  SeededRng rng(1);
  const Tensor x = rng.normal_tensor(3, 4);
  const Mask ones(3, 4, true), zeros(3, 4, false);
  EXPECT_EQ(compose_observed(x, ones).zero_filled(), x);
  EXPECT_EQ(compose_observed(x, zeros).mask().count_observed(), 0);
  EXPECT_EQ(compose_missing(x, ones).mask().count_observed(), 0);
  EXPECT_EQ(compose_missing(x, zeros).zero_filled(), x);
  EXPECT_EQ(recombine(compose_observed(x, ones), compose_missing(x, ones)), x);
}

TEST(Compose, ShapeAndConsistencyErrors) {
  const Tensor x = Tensor::Ones(2, 2);
  EXPECT_EQ(code_of([&] { compose_observed(x, Mask(2, 3, true)); }), ErrorCode::dimension);
  EXPECT_EQ(code_of([&] { compose_missing(x, Mask(3, 2, true)); }), ErrorCode::dimension);
  const IncompleteMatrix a = compose_observed(x, Mask(2, 2, true));
  EXPECT_EQ(code_of([&] { recombine(a, a); }), ErrorCode::consistency);
}

TEST(Compose, RoundTripIsIdentity) {
  SeededRng rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.index(6));
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.index(5));
    const Tensor x = rng.normal_tensor(n, d) * 1e3;
    const Mask m = random_mask(rng, n, d, rng.uniform());
    ASSERT_EQ(recombine(compose_observed(x, m), compose_missing(x, m)), x);
  }
}

TEST(MaskType, FromTensorAndComplement) {
  const Tensor t = (Tensor(2, 2) << 1, 0, 0, 1).finished();
  const Mask m = Mask::from_tensor(t);
  EXPECT_EQ(m.as_tensor(), t);
  EXPECT_EQ(m.complement().as_tensor(), (Tensor::Ones(2, 2) - t).eval());
  EXPECT_EQ(m.count_observed(), 2);
  EXPECT_THROW(Mask::from_tensor((Tensor(1, 1) << 0.5).finished()), Error);
}

TEST(Standardize, PopulationConventionExample) {
  Tensor x(3, 1);
  x << 1, 3, 100;
  Mask m(3, 1, true);
  m.set(2, 0, false);
  const Standardized s = standardize(IncompleteMatrix(x, m));
  EXPECT_EQ(s.stats.mean(0), 2.0);
  EXPECT_EQ(s.stats.std(0), 1.0);
  EXPECT_EQ(s.data.value(0, 0), -1.0);
  EXPECT_EQ(s.data.value(1, 0), 1.0);
  EXPECT_FALSE(s.data.observed(2, 0));
}

TEST(Standardize, SuppliedIdentityStatsLeaveDataUnchanged) {
  SeededRng rng(3);
  const Tensor x = rng.normal_tensor(5, 3);
  const Mask m = random_mask(rng, 5, 3, 0.3);
  const FeatureStats id{Vector::Zero(3), Vector::Ones(3)};
  const Standardized s = standardize(IncompleteMatrix(x, m), id);
  EXPECT_EQ(s.data.zero_filled(), IncompleteMatrix(x, m).zero_filled());
  EXPECT_EQ(standardize(x, id), x);
}

TEST(Standardize, DegenerateFeatures) {
  Tensor x(3, 2);
  x << 1, 5, 2, 5, 3, 5;
  Mask one_observed(3, 2, true);
  one_observed.set(1, 0, false);
  one_observed.set(2, 0, false);
  EXPECT_EQ(code_of([&] { standardize(IncompleteMatrix(x, Mask(3, 2, true))); }), ErrorCode::degenerate_feature);
  Tensor y = x;
  y.col(1) << 1, 2, 3;
  EXPECT_EQ(code_of([&] { standardize(IncompleteMatrix(y, one_observed)); }), ErrorCode::degenerate_feature);
  EXPECT_EQ(code_of([&] { complete_stats(x); }), ErrorCode::degenerate_feature);
}

TEST(Standardize, SentinelsAreNeverRead) {
  SeededRng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor x = rng.normal_tensor(8, 3);
    Mask m = random_mask(rng, 8, 3, 0.3);
    for (Eigen::Index j = 0; j < 3; ++j) {
      m.set(0, j, true);
      m.set(1, j, true);
    }
    Tensor poisoned = x;
    for (Eigen::Index i = 0; i < 8; ++i)
      for (Eigen::Index j = 0; j < 3; ++j)
        if (!m.observed(i, j)) poisoned(i, j) = trial % 2 ? std::numeric_limits<double>::quiet_NaN() : 1e300;
    const Standardized a = standardize(IncompleteMatrix(x, m));
    const Standardized b = standardize(IncompleteMatrix(poisoned, m));
    EXPECT_EQ(a.stats.mean, b.stats.mean);
    EXPECT_EQ(a.stats.std, b.stats.std);
    EXPECT_EQ(a.data.zero_filled(), b.data.zero_filled());
    EXPECT_EQ(observed_stats(IncompleteMatrix(poisoned, m)).mean, a.stats.mean);
  }
}

TEST(Standardize, DestandardizeInverts) {
  SeededRng rng(5);
  const Tensor x = rng.normal_tensor(20, 4) * 3.0;
  const FeatureStats st = complete_stats(x);
  EXPECT_LT((destandardize(standardize(x, st), st) - x).cwiseAbs().maxCoeff(), 1e-12);
  const Tensor z = standardize(x, st);
  EXPECT_LT(z.colwise().mean().cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(((z.array().square().colwise().sum() / 20.0) - 1.0).abs().maxCoeff(), 1e-12);
}

TEST(ZeroImpute, Examples) {
  Tensor x(2, 2);
  x << 1, 7, 4, 5;
  Mask m(2, 2, true);
  m.set(0, 1, false);
  const Tensor z = zero_impute(IncompleteMatrix(x, m));
  EXPECT_EQ(z, (Tensor(2, 2) << 1, 0, 4, 5).finished());
  EXPECT_EQ(zero_impute(IncompleteMatrix(x, Mask(2, 2, true))), x);
  EXPECT_EQ(zero_impute(IncompleteMatrix(x, Mask(2, 2, false))), Tensor::Zero(2, 2));
}

// -- mask-synth -----------------------------------------------------------------

TEST(GaussianSynth, MeanConvergesAndIsDeterministic) {
  SeededRng a(1), b(1);
  const std::size_t n = 40000;
  const Tensor x = gaussian_synth(n, Vector::Zero(3), Tensor::Identity(3, 3), a);
  EXPECT_EQ(x, gaussian_synth(n, Vector::Zero(3), Tensor::Identity(3, 3), b));
  for (Eigen::Index j = 0; j < 3; ++j) EXPECT_LT(std::abs(x.col(j).mean()), 4 / std::sqrt(static_cast<double>(n)));
}

TEST(GaussianSynth, CovarianceMatches) {
  SeededRng rng(2);
  const Tensor cov = equicorrelated_cov(4, 0.5);
  const Tensor x = gaussian_synth(100000, Vector::Zero(4), cov, rng);
  const Tensor centered = x.rowwise() - x.colwise().mean();
  const Tensor sample = (centered.transpose() * centered) / 100000.0;
  EXPECT_LT((sample - cov).cwiseAbs().maxCoeff(), 0.03);
}

TEST(GaussianSynth, NonPositiveDefiniteIsError) {
  SeededRng rng(3);
  Tensor cov(2, 2);
  cov << 1, 2, 2, 1;
  EXPECT_THROW(gaussian_synth(10, Vector::Zero(2), cov, rng), Error);
  EXPECT_THROW(gaussian_synth(10, Vector::Zero(3), Tensor::Identity(2, 2), rng), Error);
}

TEST(McarMask, Extremes) {
  SeededRng rng(4);
  EXPECT_EQ(mcar_mask(10, 3, 0.0, rng).count_missing(), 0);
  EXPECT_EQ(mcar_mask(10, 3, 1.0, rng).count_observed(), 0);
  EXPECT_NEAR(missing_fraction(mcar_mask(25000, 4, 0.2, rng)), 0.2, 0.01);
  EXPECT_THROW(mcar_mask(2, 2, 1.5, rng), Error);
}

TEST(SelfMask, MissingRatesAndUntouchedFeatures) {
  SeededRng rng(5);
  const Tensor x = gaussian_synth(25000, Vector::Zero(4), equicorrelated_cov(4, 0.5), rng);
  for (const double k : {0.2, 0.5, 0.8, 1.0}) {
    const Mask m = self_mask(x, {0, 1}, k, rng);
    EXPECT_NEAR(missing_fraction(m), k / 4, 0.01) << k;
    Eigen::Index subset_missing = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      ASSERT_TRUE(m.observed(i, 2) && m.observed(i, 3));
      subset_missing += !m.observed(i, 0) + !m.observed(i, 1);
    }
    EXPECT_NEAR(static_cast<double>(subset_missing) / (2.0 * x.rows()), k / 2, 0.01) << k;
  }
}

TEST(SelfMask, FullProbabilityAndTies) {
  SeededRng rng(6);
  Tensor x(4, 2);
  x << 0, 9, 2, 9, 1, 9, 1, 9;  // feature 0 mean 1, feature 1 constant
  const Mask m = self_mask(x, {0, 1}, 1.0, rng);
  EXPECT_TRUE(m.observed(0, 0));
  EXPECT_FALSE(m.observed(1, 0));
  EXPECT_TRUE(m.observed(2, 0));  // equal to the mean
  EXPECT_TRUE(m.observed(3, 0));
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_TRUE(m.observed(i, 1));
  EXPECT_THROW(self_mask(x, {2}, 0.5, rng), Error);
  EXPECT_THROW(self_mask(x, {0}, -0.1, rng), Error);
}

TEST(StarMask, Rule) {
  SeededRng a(7), b(8);
  const Tensor x = gaussian_synth(500, Vector::Zero(3), Tensor::Identity(3, 3), a);
  const Mask m = star_mask(x, a);
  EXPECT_EQ(m, star_mask(x, b));
  const double m0 = x.col(0).mean(), m1 = x.col(1).mean();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    EXPECT_EQ(m.observed(i, 0), !(x(i, 0) > m0));
    EXPECT_EQ(m.observed(i, 1), !(x(i, 1) < m1));
    EXPECT_TRUE(m.observed(i, 2));
  }
  EXPECT_EQ(code_of([&] { star_mask(Tensor::Ones(3, 1), a); }), ErrorCode::dimension);
}

TEST(MixedMask, DegenerateCases) {
  SeededRng rng(9);
  const Tensor x = rng.normal_tensor(200, 4);
  EXPECT_EQ(mixed_mask(x, {0, 1}, 0.0, 0.0, rng).count_missing(), 0);
  SeededRng a(10), b(10);
  const Mask mixed = mixed_mask(x, {0, 1}, 0.0, 0.3, a);
  EXPECT_NEAR(missing_fraction(mixed), 0.3, 0.05);
  EXPECT_EQ(mixed_mask(x, {0, 1}, 0.0, 0.3, b), mixed);
}

TEST(MixedMask, MatchesDirectSimulation) {
  SeededRng rng(11);
  const Tensor x = gaussian_synth(25000, Vector::Zero(4), equicorrelated_cov(4, 0.5), rng);
  const Mask m = mixed_mask(x, {0, 1}, 0.8, 0.2, rng);
  // Independent per-entry simulation of the union rule.
  SeededRng sim(12);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  Eigen::Index missing = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      const bool mnar = j < 2 && x(i, j) > mean(j) && sim.uniform() < 0.8;
      const bool mcar = sim.uniform() < 0.2;
      missing += mnar || mcar;
    }
  }
  const double expected = static_cast<double>(missing) / 100000.0;
  EXPECT_NEAR(missing_fraction(m), expected, 0.01);
  EXPECT_NEAR(expected, 1 - 0.8 * (1 - 0.2), 0.01);
}

TEST(MissingSpec, LabelsRoundTripAndValidation) {
  for (const std::string label : {"self_mask:0.8", "mcar:0.2", "star", "mixed:0.8:0.2"}) {
    EXPECT_EQ(parse_missing_label(label).label(), label);
  }
  MissingSpec s;
  s.probability = 1.2;
  EXPECT_THROW(s.validate(4), Error);
  s.probability = 0.5;
  s.features = {5};
  EXPECT_THROW(s.validate(4), Error);
  EXPECT_EQ(default_self_mask_features(4), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(default_self_mask_features(5), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_THROW(parse_missing_kind("sometimes"), Error);
}

TEST(ApplyMissing, DeterministicGivenSeedAndDispatches) {
  SeededRng data(13);
  const Tensor x = gaussian_synth(1000, Vector::Zero(4), equicorrelated_cov(4, 0.5), data);
  const MissingSpec spec = parse_missing_label("self_mask:0.8");
  SeededRng a(14), b(14), c(14);
  const Mask m = apply_missing(x, spec, a);
  EXPECT_EQ(m, apply_missing(x, spec, b));
  EXPECT_EQ(m, self_mask(x, spec.resolved_features(4), 0.8, c));
}

}  // namespace
}  // namespace gnr

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

#include "gnr/mask_synth.hpp"

#include "gnr/error.hpp"

#include <Eigen/Cholesky>

#include <charconv>
#include <cmath>
#include <sstream>

namespace gnr {

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::invalid_argument, std::string(what) + " must lie in [0, 1]");
}

std::string format_probability(double p) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, p);
  return std::string(buf, result.ptr);
}

Vector column_means(const CompleteMatrix& x) { return x.colwise().mean().transpose(); }

}  // namespace

void MissingSpec::validate(std::size_t d) const {
  check_probability(probability, "missing probability");
  check_probability(mcar_probability, "MCAR probability");
  for (const auto f : features) {
    if (f >= d) fail(ErrorCode::invalid_argument, "missing-spec feature index " + std::to_string(f) + " out of range");
  }
  if (kind == MissingKind::star && d < 2) fail(ErrorCode::dimension, "star mechanism needs at least two features");
}

std::vector<std::size_t> MissingSpec::resolved_features(std::size_t d) const {
  return features.empty() ? default_self_mask_features(d) : features;
}

std::string MissingSpec::label() const {
  switch (kind) {
    case MissingKind::mcar: return "mcar:" + format_probability(probability);
    case MissingKind::self_mask: return "self_mask:" + format_probability(probability);
    case MissingKind::star: return "star";
    case MissingKind::mixed:
      return "mixed:" + format_probability(probability) + ":" + format_probability(mcar_probability);
  }
  return "unknown";
}

MissingKind parse_missing_kind(const std::string& text) {
  if (text == "mcar") return MissingKind::mcar;
  if (text == "self_mask") return MissingKind::self_mask;
  if (text == "star") return MissingKind::star;
  if (text == "mixed") return MissingKind::mixed;
  fail(ErrorCode::invalid_argument, "unknown missing kind '" + text + "'");
}

std::string to_string(MissingKind kind) {
  switch (kind) {
    case MissingKind::mcar: return "mcar";
    case MissingKind::self_mask: return "self_mask";
    case MissingKind::star: return "star";
    case MissingKind::mixed: return "mixed";
  }
  return "unknown";
}

MissingSpec parse_missing_label(const std::string& label) {
  std::vector<std::string> parts;
  std::stringstream in(label);
  for (std::string part; std::getline(in, part, ':');) parts.push_back(part);
  if (parts.empty()) fail(ErrorCode::parse, "empty missing-setting label");
  MissingSpec spec;
  spec.kind = parse_missing_kind(parts[0]);
  auto number = [&](std::size_t i) {
    try {
      std::size_t used = 0;
      const double v = std::stod(parts.at(i), &used);
      if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
      return v;
    } catch (const std::exception&) {
      fail(ErrorCode::parse, "malformed missing-setting label '" + label + "'");
    }
  };
  const std::size_t expected = spec.kind == MissingKind::star ? 1 : spec.kind == MissingKind::mixed ? 3 : 2;
  if (parts.size() != expected) fail(ErrorCode::parse, "malformed missing-setting label '" + label + "'");
  if (spec.kind == MissingKind::star) spec.probability = 1.0;
  if (expected >= 2) spec.probability = number(1);
  if (expected == 3) spec.mcar_probability = number(2);
  return spec;
}

std::vector<std::size_t> default_self_mask_features(std::size_t d) {
  std::vector<std::size_t> out((d + 1) / 2);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = j;
  return out;
}

CompleteMatrix gaussian_synth(std::size_t n, const Vector& mean, const Tensor& cov, SeededRng& rng) {
  const auto d = mean.size();
  if (cov.rows() != d || cov.cols() != d) fail(ErrorCode::dimension, "gaussian_synth: covariance must be d x d");
  if (!cov.isApprox(cov.transpose(), 1e-12)) fail(ErrorCode::numeric, "gaussian_synth: covariance is not symmetric");
  const Eigen::MatrixXd dense = cov;
  Eigen::LLT<Eigen::MatrixXd> llt(dense);
  if (llt.info() != Eigen::Success) fail(ErrorCode::numeric, "gaussian_synth: covariance is not positive definite");
  const Eigen::MatrixXd lower = llt.matrixL();
  Tensor noise = rng.normal_tensor(static_cast<Eigen::Index>(n), d);
  CompleteMatrix x = noise * lower.transpose();
  x.rowwise() += mean.transpose();
  return x;
}

Tensor equicorrelated_cov(std::size_t d, double correlation) {
  const auto n = static_cast<Eigen::Index>(d);
  Tensor cov = Tensor::Constant(n, n, correlation);
  cov.diagonal().setOnes();
  return cov;
}

Mask mcar_mask(std::size_t n, std::size_t d, double p_miss, SeededRng& rng) {
  check_probability(p_miss, "MCAR probability");
  Mask m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d), true);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (rng.bernoulli(p_miss)) m.set(i, j, false);
    }
  }
  return m;
}

Mask self_mask(const CompleteMatrix& x, const std::vector<std::size_t>& features, double k, SeededRng& rng) {
  check_probability(k, "self-masking probability");
  const Vector mean = column_means(x);
  Mask m(x.rows(), x.cols(), true);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (const auto f : features) {
      if (static_cast<Eigen::Index>(f) >= x.cols()) fail(ErrorCode::invalid_argument, "self_mask: feature out of range");
      const auto j = static_cast<Eigen::Index>(f);
      // One draw per listed entry keeps the stream layout independent of x.
      const bool hit = rng.bernoulli(k);
      if (x(i, j) > mean(j) && hit) m.set(i, j, false);
    }
  }
  return m;
}

Mask star_mask(const CompleteMatrix& x, SeededRng& /*rng*/) {
  if (x.cols() < 2) fail(ErrorCode::dimension, "star_mask: needs at least two features");
  const Vector mean = column_means(x);
  Mask m(x.rows(), x.cols(), true);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (x(i, 0) > mean(0)) m.set(i, 0, false);
    if (x(i, 1) < mean(1)) m.set(i, 1, false);
  }
  return m;
}

Mask mixed_mask(const CompleteMatrix& x, const std::vector<std::size_t>& features, double k_mnar, double p_mcar,
                SeededRng& rng) {
  // MCAR first, so k_mnar = 0 reproduces mcar_mask on the same stream.
  Mask m = mcar_mask(static_cast<std::size_t>(x.rows()), static_cast<std::size_t>(x.cols()), p_mcar, rng);
  const Mask mnar = self_mask(x, features, k_mnar, rng);
  return Mask(Mask::Bits(m.bits().cwiseMin(mnar.bits())));
}

Mask apply_missing(const CompleteMatrix& x, const MissingSpec& spec, SeededRng& rng) {
  const auto d = static_cast<std::size_t>(x.cols());
  spec.validate(d);
  switch (spec.kind) {
    case MissingKind::mcar: return mcar_mask(static_cast<std::size_t>(x.rows()), d, spec.probability, rng);
    case MissingKind::self_mask: return self_mask(x, spec.resolved_features(d), spec.probability, rng);
    case MissingKind::star: return star_mask(x, rng);
    case MissingKind::mixed:
      return mixed_mask(x, spec.resolved_features(d), spec.probability, spec.mcar_probability, rng);
  }
  fail(ErrorCode::invalid_argument, "unknown missing kind");
}

}  // namespace gnr

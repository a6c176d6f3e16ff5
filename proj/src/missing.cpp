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

#include "gnr/missing.hpp"

#include "gnr/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gnr {

namespace {

void check_stats(const FeatureStats& stats, Eigen::Index cols) {
  if (stats.mean.size() != cols || stats.std.size() != cols)
    fail(ErrorCode::dimension, "feature stats length does not match column count");
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (!(stats.std(j) > 0.0) || !std::isfinite(stats.std(j)))
      fail(ErrorCode::degenerate_feature, "feature " + std::to_string(j) + " has non-positive standard deviation");
  }
}

}  // namespace

Mask::Mask(Eigen::Index rows, Eigen::Index cols, bool observed)
    : bits_(Bits::Constant(rows, cols, observed ? 1 : 0)) {}

Mask::Mask(Bits bits) : bits_(std::move(bits)) {
  if (!((bits_.array() == 0) || (bits_.array() == 1)).all()) fail(ErrorCode::domain, "mask entries must be 0 or 1");
}

Mask Mask::from_tensor(const Tensor& t) {
  if (!((t.array() == 0.0) || (t.array() == 1.0)).all()) fail(ErrorCode::domain, "mask entries must be 0 or 1");
  return Mask(Bits(t.cast<std::uint8_t>()));
}

Mask Mask::complement() const { return Mask(Bits((1 - bits_.array()).matrix())); }

Eigen::Index Mask::count_observed() const { return bits_.cast<Eigen::Index>().sum(); }

IncompleteMatrix::IncompleteMatrix(Tensor values, Mask mask) : values_(std::move(values)), mask_(std::move(mask)) {
  if (values_.rows() != mask_.rows() || values_.cols() != mask_.cols())
    fail(ErrorCode::dimension, "mask shape does not match value shape");
}

double IncompleteMatrix::value(Eigen::Index i, Eigen::Index j) const {
  if (!mask_.observed(i, j))
    fail(ErrorCode::invalid_argument, "entry (" + std::to_string(i) + "," + std::to_string(j) + ") is missing");
  return values_(i, j);
}

Tensor IncompleteMatrix::zero_filled() const {
  return (mask_.bits().array() != 0).select(values_.array(), 0.0).matrix();
}

IncompleteMatrix IncompleteMatrix::select_rows(const std::vector<Eigen::Index>& rows) const {
  Tensor v(static_cast<Eigen::Index>(rows.size()), cols());
  Mask::Bits b(static_cast<Eigen::Index>(rows.size()), cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    v.row(static_cast<Eigen::Index>(i)) = values_.row(rows[i]);
    b.row(static_cast<Eigen::Index>(i)) = mask_.bits().row(rows[i]);
  }
  return IncompleteMatrix(std::move(v), Mask(std::move(b)));
}

IncompleteMatrix compose_observed(const CompleteMatrix& x, const Mask& m) {
  if (x.rows() != m.rows() || x.cols() != m.cols()) fail(ErrorCode::dimension, "compose_observed: shape mismatch");
  const double sentinel = std::numeric_limits<double>::quiet_NaN();
  Tensor v = (m.bits().array() != 0).select(x.array(), sentinel).matrix();
  return IncompleteMatrix(std::move(v), m);
}

IncompleteMatrix compose_missing(const CompleteMatrix& x, const Mask& m) {
  if (x.rows() != m.rows() || x.cols() != m.cols()) fail(ErrorCode::dimension, "compose_missing: shape mismatch");
  return compose_observed(x, m.complement());
}

CompleteMatrix recombine(const IncompleteMatrix& observed, const IncompleteMatrix& missing) {
  if (observed.rows() != missing.rows() || observed.cols() != missing.cols())
    fail(ErrorCode::dimension, "recombine: shape mismatch");
  if (!(observed.mask().bits().array() != missing.mask().bits().array()).all())
    fail(ErrorCode::consistency, "recombine: masks are not complementary");
  return (observed.mask().bits().array() != 0).select(observed.raw_values().array(), missing.raw_values().array()).matrix();
}

FeatureStats observed_stats(const IncompleteMatrix& data) {
  FeatureStats stats{Vector(data.cols()), Vector(data.cols())};
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    double sum = 0.0;
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      if (data.observed(i, j)) {
        sum += data.raw_values()(i, j);
        ++count;
      }
    }
    if (count < 2)
      fail(ErrorCode::degenerate_feature, "feature " + std::to_string(j) + " has fewer than two observed entries");
    const double mean = sum / static_cast<double>(count);
    double sq = 0.0;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      if (data.observed(i, j)) {
        const double d = data.raw_values()(i, j) - mean;
        sq += d * d;
      }
    }
    stats.mean(j) = mean;
    stats.std(j) = std::sqrt(sq / static_cast<double>(count));
  }
  check_stats(stats, data.cols());
  return stats;
}

FeatureStats complete_stats(const CompleteMatrix& x) {
  return observed_stats(IncompleteMatrix(x, Mask(x.rows(), x.cols(), true)));
}

Standardized standardize(const IncompleteMatrix& data, const std::optional<FeatureStats>& stats) {
  FeatureStats s = stats ? *stats : observed_stats(data);
  check_stats(s, data.cols());
  Tensor v = data.raw_values();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      if (data.observed(i, j)) v(i, j) = (v(i, j) - s.mean(j)) / s.std(j);
    }
  }
  return {IncompleteMatrix(std::move(v), data.mask()), std::move(s)};
}

CompleteMatrix standardize(const CompleteMatrix& x, const FeatureStats& stats) {
  check_stats(stats, x.cols());
  return ((x.rowwise() - stats.mean.transpose()).array().rowwise() / stats.std.transpose().array()).matrix();
}

IncompleteMatrix destandardize(const IncompleteMatrix& data, const FeatureStats& stats) {
  check_stats(stats, data.cols());
  Tensor v = data.raw_values();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      if (data.observed(i, j)) v(i, j) = v(i, j) * stats.std(j) + stats.mean(j);
    }
  }
  return IncompleteMatrix(std::move(v), data.mask());
}

CompleteMatrix destandardize(const CompleteMatrix& x, const FeatureStats& stats) {
  check_stats(stats, x.cols());
  return ((x.array().rowwise() * stats.std.transpose().array()).rowwise() + stats.mean.transpose().array()).matrix();
}

CompleteMatrix zero_impute(const IncompleteMatrix& data) { return data.zero_filled(); }

}  // namespace gnr

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

#ifndef GNR_MISSING_HPP
#define GNR_MISSING_HPP

#include "gnr/tensor.hpp"

#include <cstdint>
#include <optional>

namespace gnr {

/// Binary observation indicator: 1 = observed, 0 = missing.
class Mask {
 public:
  using Bits = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Mask() = default;
  Mask(Eigen::Index rows, Eigen::Index cols, bool observed);
  explicit Mask(Bits bits);
  /// Entries must be exactly 0 or 1.
  static Mask from_tensor(const Tensor& t);

  Eigen::Index rows() const { return bits_.rows(); }
  Eigen::Index cols() const { return bits_.cols(); }
  bool observed(Eigen::Index i, Eigen::Index j) const { return bits_(i, j) != 0; }
  void set(Eigen::Index i, Eigen::Index j, bool observed) { bits_(i, j) = observed ? 1 : 0; }
  const Bits& bits() const { return bits_; }

  Tensor as_tensor() const { return bits_.cast<double>(); }
  Mask complement() const;
  Eigen::Index count_observed() const;
  Eigen::Index count_missing() const { return bits_.size() - count_observed(); }

  friend bool operator==(const Mask& a, const Mask& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a.bits_ == b.bits_;
  }

 private:
  Bits bits_;
};

/// Values plus a mask. Positions with mask 0 hold unspecified content that no
/// operation reads.
class IncompleteMatrix {
 public:
  IncompleteMatrix() = default;
  IncompleteMatrix(Tensor values, Mask mask);

  Eigen::Index rows() const { return values_.rows(); }
  Eigen::Index cols() const { return values_.cols(); }
  const Mask& mask() const { return mask_; }
  bool observed(Eigen::Index i, Eigen::Index j) const { return mask_.observed(i, j); }
  /// Throws ErrorCode::invalid_argument at a missing position.
  double value(Eigen::Index i, Eigen::Index j) const;
  /// Raw storage; content at missing positions is meaningless.
  const Tensor& raw_values() const { return values_; }
  /// Observed entries copied, missing entries exactly 0.
  Tensor zero_filled() const;
  /// Rows selected by index, in the given order.
  IncompleteMatrix select_rows(const std::vector<Eigen::Index>& rows) const;

 private:
  Tensor values_;
  Mask mask_;
};

using CompleteMatrix = Tensor;

struct FeatureStats {
  Vector mean;
  Vector std;
};

IncompleteMatrix compose_observed(const CompleteMatrix& x, const Mask& m);
/// The complement view: readable exactly where m is 0.
IncompleteMatrix compose_missing(const CompleteMatrix& x, const Mask& m);
/// Throws ErrorCode::consistency unless the two masks are exact complements.
CompleteMatrix recombine(const IncompleteMatrix& observed, const IncompleteMatrix& missing);

/// Population (divide-by-n) statistics over observed entries. Throws
/// ErrorCode::degenerate_feature for features with fewer than two observed
/// entries or zero spread.
FeatureStats observed_stats(const IncompleteMatrix& data);
/// Population statistics of a complete matrix.
FeatureStats complete_stats(const CompleteMatrix& x);

struct Standardized {
  IncompleteMatrix data;
  FeatureStats stats;
};

/// (v - mean) / std on observed entries. Stats default to observed_stats().
Standardized standardize(const IncompleteMatrix& data, const std::optional<FeatureStats>& stats = std::nullopt);
CompleteMatrix standardize(const CompleteMatrix& x, const FeatureStats& stats);
IncompleteMatrix destandardize(const IncompleteMatrix& data, const FeatureStats& stats);
CompleteMatrix destandardize(const CompleteMatrix& x, const FeatureStats& stats);

CompleteMatrix zero_impute(const IncompleteMatrix& data);

}  // namespace gnr

#endif  // GNR_MISSING_HPP

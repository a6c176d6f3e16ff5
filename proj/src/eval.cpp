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

#include "gnr/eval.hpp"

#include "gnr/config.hpp"
#include "gnr/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace gnr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_shapes(const CompleteMatrix& truth, const CompleteMatrix& imputed, const Mask& m) {
  if (truth.rows() != imputed.rows() || truth.cols() != imputed.cols() || truth.rows() != m.rows() ||
      truth.cols() != m.cols())
    fail(ErrorCode::dimension, "truth, imputation and mask shapes differ");
}

std::string cell(double v) { return std::isnan(v) ? std::string() : format_real(v); }

}  // namespace

double mse_missing(const CompleteMatrix& truth, const CompleteMatrix& imputed, const Mask& m) {
  check_shapes(truth, imputed, m);
  double total = 0.0;
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < truth.rows(); ++i) {
    for (Eigen::Index j = 0; j < truth.cols(); ++j) {
      if (m.observed(i, j)) continue;
      const double e = imputed(i, j) - truth(i, j);
      total += e * e;
      ++count;
    }
  }
  if (count == 0) fail(ErrorCode::undefined_metric, "no missing entries to score");
  return total / static_cast<double>(count);
}

double rmse_missing(const CompleteMatrix& truth, const CompleteMatrix& imputed, const Mask& m) {
  return std::sqrt(mse_missing(truth, imputed, m));
}

double mask_accuracy(const Mask& true_mask, const Tensor& prob_mask, double threshold,
                     const std::vector<std::size_t>& features) {
  if (true_mask.rows() != prob_mask.rows() || true_mask.cols() != prob_mask.cols())
    fail(ErrorCode::dimension, "mask and probabilistic mask shapes differ");
  if (!(threshold > 0.0 && threshold < 1.0)) fail(ErrorCode::domain, "threshold must lie in (0, 1)");
  if (features.empty()) fail(ErrorCode::undefined_metric, "mask accuracy needs at least one feature");
  std::size_t hits = 0;
  std::size_t total = 0;
  for (const std::size_t f : features) {
    const auto j = static_cast<Eigen::Index>(f);
    if (j >= true_mask.cols()) fail(ErrorCode::invalid_argument, "feature index out of range");
    for (Eigen::Index i = 0; i < true_mask.rows(); ++i) {
      hits += (prob_mask(i, j) >= threshold) == true_mask.observed(i, j) ? 1 : 0;
      ++total;
    }
  }
  if (total == 0) fail(ErrorCode::undefined_metric, "mask accuracy over zero entries");
  return static_cast<double>(hits) / static_cast<double>(total);
}

std::vector<std::size_t> features_with_missing(const Mask& m) {
  std::vector<std::size_t> out;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if ((m.bits().col(j).array() == 0).any()) out.push_back(static_cast<std::size_t>(j));
  }
  return out;
}

double random_floor(double k) {
  if (!(k >= 0.0 && k <= 1.0)) fail(ErrorCode::domain, "k must lie in [0, 1]");
  const double miss = k / 2.0;
  return miss * miss + (1.0 - miss) * (1.0 - miss);
}

double rating_transform(int r, int r_max, double epsilon) {
  if (r_max < 1 || r_max > 60) fail(ErrorCode::domain, "r_max must lie in [1, 60]");
  if (r < 1 || r > r_max) fail(ErrorCode::domain, "rating " + std::to_string(r) + " outside [1, r_max]");
  const double num = std::ldexp(1.0, r) - 1.0;
  const double den = std::ldexp(1.0, r_max) - 1.0;
  return epsilon + (1.0 - epsilon) * (num / den);
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  double total = 0.0;
  for (const double v : values) {
    if (std::isnan(v)) continue;
    total += v;
    ++s.n;
  }
  if (s.n == 0) {
    s.mean = kNaN;
    s.stderr_ = kNaN;
    return s;
  }
  s.mean = total / static_cast<double>(s.n);
  if (s.n < 2) {
    s.stderr_ = kNaN;
    return s;
  }
  double ss = 0.0;
  for (const double v : values) {
    if (!std::isnan(v)) ss += (v - s.mean) * (v - s.mean);
  }
  s.stderr_ = std::sqrt(ss / static_cast<double>(s.n - 1)) / std::sqrt(static_cast<double>(s.n));
  return s;
}

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> columns{
      "method",          "setting",          "n_runs",       "failed_runs",  "rmse_mean",
      "rmse_stderr",     "mse_mean",         "mse_stderr",   "mask_acc_mean", "mask_acc_stderr",
      "random_floor",    "rmse_raw_mean",    "rmse_raw_stderr", "improvement_pct", "best_baseline",
      "errors"};
  return columns;
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  out << join(report_columns(), ',') << '\n';
  for (const auto& r : report.rows) {
    std::string errors = r.errors;
    std::replace(errors.begin(), errors.end(), ',', ';');
    std::replace(errors.begin(), errors.end(), '\n', ' ');
    out << r.method << ',' << r.setting << ',' << r.n_runs << ',' << r.failed_runs << ',' << cell(r.rmse.mean) << ','
        << cell(r.rmse.stderr_) << ',' << cell(r.mse.mean) << ',' << cell(r.mse.stderr_) << ','
        << cell(r.mask_accuracy.mean) << ',' << cell(r.mask_accuracy.stderr_) << ',' << cell(r.random_floor) << ','
        << cell(r.rmse_raw.mean) << ',' << cell(r.rmse_raw.stderr_) << ",,," << errors << '\n';
  }
  for (const auto& imp : report.improvements) {
    out << "%improv," << imp.setting << ",,,,,,,,,,,," << cell(imp.improvement_pct) << ',' << imp.best_baseline
        << ",\n";
  }
}

void write_timing_csv(std::ostream& out, const EvalReport& report) {
  out << "method,setting,n_runs,runtime_mean_s\n";
  for (const auto& r : report.rows) {
    out << r.method << ',' << r.setting << ',' << r.n_runs << ',' << cell(r.runtime) << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const CompleteMatrix& truth, const Mask& m,
                         const std::vector<std::string>& names, std::size_t bins) {
  if (truth.rows() != m.rows() || truth.cols() != m.cols()) fail(ErrorCode::dimension, "truth and mask shapes differ");
  if (names.size() != static_cast<std::size_t>(truth.cols()))
    fail(ErrorCode::dimension, "feature-name count does not match column count");
  if (bins == 0) fail(ErrorCode::invalid_argument, "histogram needs at least one bin");
  out << "feature,bin,lower,upper,observed,missing\n";
  for (Eigen::Index j = 0; j < truth.cols(); ++j) {
    const double lo = truth.col(j).minCoeff();
    const double hi = truth.col(j).maxCoeff();
    const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
    std::vector<std::size_t> observed(bins, 0);
    std::vector<std::size_t> missing(bins, 0);
    for (Eigen::Index i = 0; i < truth.rows(); ++i) {
      auto b = static_cast<std::size_t>((truth(i, j) - lo) / width);
      b = std::min(b, bins - 1);
      (m.observed(i, j) ? observed : missing)[b] += 1;
    }
    for (std::size_t b = 0; b < bins; ++b) {
      out << names[static_cast<std::size_t>(j)] << ',' << b << ',' << format_real(lo + width * static_cast<double>(b))
          << ',' << format_real(lo + width * static_cast<double>(b + 1)) << ',' << observed[b] << ',' << missing[b]
          << '\n';
    }
  }
}

}  // namespace gnr

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

#ifndef GNR_EVAL_HPP
#define GNR_EVAL_HPP

// Imputation and mask-reconstruction metrics plus report aggregation.

#include "gnr/missing.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace gnr {

/// Mean squared error over the entries with m = 0. Throws
/// ErrorCode::undefined_metric when nothing is missing.
double mse_missing(const CompleteMatrix& truth, const CompleteMatrix& imputed, const Mask& m);
double rmse_missing(const CompleteMatrix& truth, const CompleteMatrix& imputed, const Mask& m);

/// Fraction of entries in `features` where (prob >= threshold) agrees with the
/// true mask.
double mask_accuracy(const Mask& true_mask, const Tensor& prob_mask, double threshold,
                     const std::vector<std::size_t>& features);

/// Features with at least one missing entry.
std::vector<std::size_t> features_with_missing(const Mask& m);

/// Accuracy of a predictor that reports "missing" at the marginal rate k/2 of
/// a self-masked feature but carries no per-entry information.
double random_floor(double k);

/// epsilon + (1 - epsilon) * (2^r - 1) / (2^r_max - 1).
double rating_transform(int r, int r_max, double epsilon);

struct Summary {
  double mean = 0.0;
  /// Sample standard deviation over sqrt(n); NaN when n < 2.
  double stderr_ = 0.0;
  std::size_t n = 0;
};

/// NaN entries are skipped. An empty input yields mean NaN and n = 0.
Summary summarize(const std::vector<double>& values);

struct ReportRow {
  std::string method;
  std::string setting;
  std::size_t n_runs = 0;
  std::size_t failed_runs = 0;
  Summary rmse;
  Summary mse;
  Summary mask_accuracy;
  Summary rmse_raw;
  /// NaN when the setting is not a self-masking one.
  double random_floor = 0.0;
  /// Mean wall-clock seconds per run.
  double runtime = 0.0;
  std::string errors;
};

/// (best_baseline_rmse - gnr_rmse) / best_baseline_rmse, in percent.
struct ImprovementRow {
  std::string setting;
  std::string best_baseline;
  double improvement_pct = 0.0;
};

struct EvalReport {
  std::vector<ReportRow> rows;
  std::vector<ImprovementRow> improvements;
};

/// Column order of report.csv.
const std::vector<std::string>& report_columns();
/// Metric rows, then one `%improv` row per setting. Runtimes are written by
/// write_timing_csv only, so report.csv is reproducible bit for bit.
void write_report_csv(std::ostream& out, const EvalReport& report);
void write_timing_csv(std::ostream& out, const EvalReport& report);

/// Per feature: `bins` equal-width bins over the complete-data range with the
/// count of observed and missing entries in each.
void write_histogram_csv(std::ostream& out, const CompleteMatrix& truth, const Mask& m,
                         const std::vector<std::string>& names, std::size_t bins);

}  // namespace gnr

#endif  // GNR_EVAL_HPP

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

#include "gnr/experiment.hpp"

#include "gnr/error.hpp"
#include "gnr/mask_synth.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

namespace gnr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string cell(double v) { return std::isnan(v) ? std::string() : format_real(v); }

void score(CellResult& out, const CompleteMatrix& truth_std, const CompleteMatrix& truth_raw, const Mask& mask,
           const FeatureStats& stats, const ImputationResult& result, double threshold) {
  out.mse = mse_missing(truth_std, result.imputed, mask);
  out.rmse = std::sqrt(out.mse);
  out.rmse_raw = rmse_missing(truth_raw, destandardize(result.imputed, stats), mask);
  const auto features = features_with_missing(mask);
  out.mask_accuracy = features.empty() ? kNaN : mask_accuracy(mask, result.probabilistic_mask, threshold, features);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const std::function<void(const CellResult&)>& on_cell) {
  if (spec.seeds.empty()) fail(ErrorCode::invalid_argument, "experiment needs at least one seed");
  if (spec.settings.empty()) fail(ErrorCode::invalid_argument, "experiment needs at least one missingness setting");
  if (spec.methods.empty()) fail(ErrorCode::invalid_argument, "experiment needs at least one method");
  spec.model.validate();

  ExperimentResult result;
  for (const std::uint64_t seed : spec.seeds) {
    SeededRng root(seed);
    CompleteMatrix raw;
    if (spec.data) {
      raw = *spec.data;
    } else {
      SeededRng data_rng = root.substream("data");
      raw = gaussian_synth(spec.synth.rows, spec.synth.resolved_mean(), spec.synth.resolved_cov(), data_rng);
    }
    const FeatureStats stats = complete_stats(raw);
    const CompleteMatrix truth = standardize(raw, stats);
    for (const auto& setting : spec.settings) {
      setting.validate(static_cast<std::size_t>(raw.cols()));
      SeededRng mask_rng = root.substream("mask").substream(setting.label());
      const Mask mask = apply_missing(raw, setting, mask_rng);
      const IncompleteMatrix observed = compose_observed(truth, mask);
      for (const Method method : spec.methods) {
        CellResult c;
        c.method = to_string(method);
        c.setting = setting.label();
        c.seed = seed;
        GnrConfig config = spec.model;
        config.seed = seed;
        const auto start = std::chrono::steady_clock::now();
        try {
          const ImputationResult imputed = run_method(method, observed, config);
          score(c, truth, raw, mask, stats, imputed, spec.threshold);
        } catch (const std::exception& e) {
          c.failed = true;
          c.error = e.what();
          c.rmse = c.mse = c.mask_accuracy = c.rmse_raw = kNaN;
        }
        c.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (on_cell) on_cell(c);
        result.cells.push_back(std::move(c));
      }
    }
  }
  result.report = aggregate(result.cells, spec.settings, spec.methods);
  return result;
}

EvalReport aggregate(const std::vector<CellResult>& cells, const std::vector<MissingSpec>& settings,
                     const std::vector<Method>& methods) {
  EvalReport report;
  for (const auto& setting : settings) {
    const std::string label = setting.label();
    double gnr_rmse = kNaN;
    double best_rmse = kNaN;
    std::string best_name;
    for (const Method method : methods) {
      ReportRow row;
      row.method = to_string(method);
      row.setting = label;
      std::vector<double> rmse, mse, acc, raw;
      double runtime = 0.0;
      std::size_t runs = 0;
      for (const auto& c : cells) {
        if (c.method != row.method || c.setting != label) continue;
        runtime += c.runtime;
        ++runs;
        if (c.failed) {
          ++row.failed_runs;
          if (!row.errors.empty()) row.errors += " | ";
          row.errors += "seed " + std::to_string(c.seed) + ": " + c.error;
          continue;
        }
        rmse.push_back(c.rmse);
        mse.push_back(c.mse);
        acc.push_back(c.mask_accuracy);
        raw.push_back(c.rmse_raw);
      }
      row.n_runs = rmse.size();
      row.rmse = summarize(rmse);
      row.mse = summarize(mse);
      row.mask_accuracy = summarize(acc);
      row.rmse_raw = summarize(raw);
      row.random_floor = setting.kind == MissingKind::self_mask ? random_floor(setting.probability) : kNaN;
      row.runtime = runs > 0 ? runtime / static_cast<double>(runs) : kNaN;
      if (method == Method::gnr) {
        gnr_rmse = row.rmse.mean;
      } else if (!std::isnan(row.rmse.mean) && (std::isnan(best_rmse) || row.rmse.mean < best_rmse)) {
        best_rmse = row.rmse.mean;
        best_name = row.method;
      }
      report.rows.push_back(std::move(row));
    }
    if (!std::isnan(gnr_rmse) && !std::isnan(best_rmse) && best_rmse > 0.0) {
      report.improvements.push_back({label, best_name, 100.0 * (best_rmse - gnr_rmse) / best_rmse});
    }
  }
  return report;
}

void write_cells_csv(std::ostream& out, const std::vector<CellResult>& cells) {
  out << "method,setting,seed,rmse,mse,mask_acc,rmse_raw,failed\n";
  for (const auto& c : cells) {
    out << c.method << ',' << c.setting << ',' << c.seed << ',' << cell(c.rmse) << ',' << cell(c.mse) << ','
        << cell(c.mask_accuracy) << ',' << cell(c.rmse_raw) << ',' << (c.failed ? 1 : 0) << '\n';
  }
}

}  // namespace gnr

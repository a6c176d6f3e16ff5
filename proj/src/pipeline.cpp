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

#include "gnr/pipeline.hpp"

#include "gnr/error.hpp"
#include "gnr/mask_synth.hpp"

#include <fstream>

namespace gnr {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  return out;
}

}  // namespace

SynthOutput synthesize(const RunConfig& run) {
  SeededRng root(run.model.seed);
  SeededRng data_rng = root.substream("data");
  SynthOutput out;
  out.truth = gaussian_synth(run.synth.rows, run.synth.resolved_mean(), run.synth.resolved_cov(), data_rng);
  run.missing.validate(run.synth.features);
  SeededRng mask_rng = root.substream("mask").substream(run.missing.label());
  out.mask = apply_missing(out.truth, run.missing, mask_rng);
  out.observed = compose_observed(out.truth, out.mask);
  out.feature_names = default_feature_names(run.synth.features);
  return out;
}

Dataset load_dataset(const RunConfig& run) {
  if (run.data_path.empty()) fail(ErrorCode::invalid_argument, "data.path is not set");
  if (run.data_format == DataFormat::matrix) return load_matrix_csv(run.data_path);
  SeededRng rng = SeededRng(run.model.seed).substream("ratings");
  IncompleteMatrix m = load_triplets(run.data_path, run.n_users, run.n_items, run.r_max,
                                     run.rating_train_mode ? RatingMode::train : RatingMode::test, rng);
  std::vector<std::string> names;
  for (std::size_t j = 0; j < run.n_items; ++j) names.push_back("item" + std::to_string(j));
  return {std::move(m), std::move(names)};
}

FitResult fit(const Dataset& data, const RunConfig& run) {
  FitResult result;
  Checkpoint& cp = result.checkpoint;
  cp.method = run.method;
  cp.features = static_cast<std::size_t>(data.data.cols());
  cp.feature_names = data.feature_names;
  cp.config = method_config(run.method, run.model);
  if (run.method == Method::mean) {
    cp.feature_means = observed_means(data.data);
    return result;
  }
  IncompleteMatrix x = data.data;
  if (run.standardize) {
    Standardized s = standardize(data.data);
    cp.stats = s.stats;
    x = std::move(s.data);
  }
  TrainedModel model = train(x, cp.config);
  cp.params = std::move(model.params);
  result.log = std::move(model.log);
  return result;
}

ImputationResult impute_with(const Checkpoint& cp, const IncompleteMatrix& data) {
  if (static_cast<std::size_t>(data.cols()) != cp.features)
    fail(ErrorCode::consistency, "dataset has " + std::to_string(data.cols()) + " features, checkpoint expects " +
                                     std::to_string(cp.features));
  ImputationResult result;
  if (cp.method == Method::mean) {
    result.imputed = data.raw_values();
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      for (Eigen::Index j = 0; j < data.cols(); ++j) {
        if (!data.observed(i, j)) result.imputed(i, j) = cp.feature_means(j);
      }
    }
    result.probabilistic_mask = Tensor::Constant(data.rows(), data.cols(), 0.5);
    return result;
  }
  if (!cp.params) fail(ErrorCode::consistency, "checkpoint has no model parameters");
  const IncompleteMatrix x = cp.stats ? standardize(data, cp.stats).data : data;
  result = impute(x, *cp.params, cp.config);
  if (cp.stats) result.imputed = destandardize(result.imputed, *cp.stats);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      if (data.observed(i, j)) result.imputed(i, j) = data.raw_values()(i, j);
    }
  }
  if (cp.method == Method::miwae_alpha0) result.probabilistic_mask.setConstant(0.5);
  return result;
}

ExperimentSpec experiment_spec(const RunConfig& run) {
  ExperimentSpec spec;
  spec.synth = run.synth;
  if (!run.data_path.empty()) {
    const Dataset d = load_dataset(run);
    if (d.data.mask().count_missing() > 0)
      fail(ErrorCode::invalid_argument, "bench data at data.path must be complete");
    spec.data = d.data.raw_values();
  }
  spec.settings = run.bench_settings;
  spec.methods = run.bench_methods;
  spec.seeds = run.seeds;
  spec.model = run.model;
  spec.threshold = run.mask_threshold;
  return spec;
}

void write_echo(const std::filesystem::path& dir, const RunConfig& run) {
  ensure_directory(dir);
  write_text_file(dir / kEchoFile, echo(run));
}

void write_training_log(const std::filesystem::path& path, const TrainingLog& log) {
  auto out = open_output(path);
  out << "iteration,bound\n";
  for (std::size_t i = 0; i < log.bound.size(); ++i) out << log.iterations[i] << ',' << format_real(log.bound[i]) << '\n';
}

void write_bench_outputs(const std::filesystem::path& dir, const ExperimentResult& result) {
  ensure_directory(dir);
  {
    auto out = open_output(dir / "report.csv");
    write_report_csv(out, result.report);
  }
  {
    auto out = open_output(dir / "cells.csv");
    write_cells_csv(out, result.cells);
  }
  auto out = open_output(dir / "timing.csv");
  write_timing_csv(out, result.report);
}

}  // namespace gnr

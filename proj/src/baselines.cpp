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

#include "gnr/baselines.hpp"

#include "gnr/error.hpp"

#include <string>

namespace gnr {

BaselineKind parse_baseline_kind(const std::string& text) {
  if (text == "mean") return BaselineKind::mean;
  if (text == "miwae_alpha0") return BaselineKind::miwae_alpha0;
  if (text == "serial_selection") return BaselineKind::serial_selection;
  fail(ErrorCode::invalid_argument, "unknown baseline '" + text + "'");
}

Method parse_method(const std::string& text) {
  if (text == "gnr") return Method::gnr;
  switch (parse_baseline_kind(text)) {
    case BaselineKind::mean: return Method::mean;
    case BaselineKind::miwae_alpha0: return Method::miwae_alpha0;
    case BaselineKind::serial_selection: return Method::serial_selection;
  }
  fail(ErrorCode::invalid_argument, "unknown method '" + text + "'");
}

std::string to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::mean: return "mean";
    case BaselineKind::miwae_alpha0: return "miwae_alpha0";
    case BaselineKind::serial_selection: return "serial_selection";
  }
  return "unknown";
}

std::string to_string(Method method) {
  switch (method) {
    case Method::gnr: return "gnr";
    case Method::mean: return "mean";
    case Method::miwae_alpha0: return "miwae_alpha0";
    case Method::serial_selection: return "serial_selection";
  }
  return "unknown";
}

Vector observed_means(const IncompleteMatrix& data) {
  Vector means(data.cols());
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    double sum = 0.0;
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      if (data.observed(i, j)) {
        sum += data.raw_values()(i, j);
        ++count;
      }
    }
    if (count == 0) fail(ErrorCode::degenerate_feature, "feature " + std::to_string(j) + " has no observed entry");
    means(j) = sum / static_cast<double>(count);
  }
  return means;
}

CompleteMatrix mean_impute(const IncompleteMatrix& data) {
  const Vector means = observed_means(data);
  CompleteMatrix out = data.raw_values();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      if (!data.observed(i, j)) out(i, j) = means(j);
    }
  }
  return out;
}

GnrConfig method_config(Method method, GnrConfig config) {
  switch (method) {
    case Method::gnr:
    case Method::mean: break;
    case Method::miwae_alpha0: config.alpha = 0.0; break;
    case Method::serial_selection: config.mask_pathway = MaskPathway::serial; break;
  }
  return config;
}

TrainedModel train_serial_selection(const IncompleteMatrix& dataset, GnrConfig config) {
  return train(dataset, method_config(Method::serial_selection, std::move(config)));
}

ImputationResult run_method(Method method, const IncompleteMatrix& dataset, const GnrConfig& config) {
  if (method == Method::mean) {
    ImputationResult result;
    result.imputed = mean_impute(dataset);
    result.probabilistic_mask = Tensor::Constant(dataset.rows(), dataset.cols(), 0.5);
    return result;
  }
  const GnrConfig fitted = method_config(method, config);
  const TrainedModel model = train(dataset, fitted);
  ImputationResult result = impute(dataset, model.params, fitted);
  if (method == Method::miwae_alpha0) result.probabilistic_mask.setConstant(0.5);
  return result;
}

ImputationResult run_baseline(BaselineKind kind, const IncompleteMatrix& dataset, const GnrConfig& config) {
  switch (kind) {
    case BaselineKind::mean: return run_method(Method::mean, dataset, config);
    case BaselineKind::miwae_alpha0: return run_method(Method::miwae_alpha0, dataset, config);
    case BaselineKind::serial_selection: return run_method(Method::serial_selection, dataset, config);
  }
  fail(ErrorCode::invalid_argument, "unknown baseline kind");
}

}  // namespace gnr

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

#ifndef GNR_BASELINES_HPP
#define GNR_BASELINES_HPP

#include "gnr/missing.hpp"
#include "gnr/model.hpp"

#include <string>

namespace gnr {

enum class BaselineKind { mean, miwae_alpha0, serial_selection };

/// Every imputer the toolkit can fit: the conjunction model plus baselines.
enum class Method { gnr, mean, miwae_alpha0, serial_selection };

BaselineKind parse_baseline_kind(const std::string& text);
Method parse_method(const std::string& text);
std::string to_string(BaselineKind kind);
std::string to_string(Method method);

/// Missing entries replaced by the observed per-feature mean. Throws
/// ErrorCode::degenerate_feature when a feature has no observed entry.
CompleteMatrix mean_impute(const IncompleteMatrix& data);
Vector observed_means(const IncompleteMatrix& data);

/// GNR's encoder and data decoder with a selection-model mask head: one dense
/// d -> d layer plus sigmoid applied to the decoded data mean.
TrainedModel train_serial_selection(const IncompleteMatrix& dataset, GnrConfig config);

/// Fitted model configuration for a method: alpha forced to 0 for
/// miwae_alpha0, the serial pathway for serial_selection.
GnrConfig method_config(Method method, GnrConfig config);

/// Fit and impute. Baselines without a mask model report an all-0.5
/// probabilistic mask.
ImputationResult run_baseline(BaselineKind kind, const IncompleteMatrix& dataset, const GnrConfig& config);
ImputationResult run_method(Method method, const IncompleteMatrix& dataset, const GnrConfig& config);

}  // namespace gnr

#endif  // GNR_BASELINES_HPP

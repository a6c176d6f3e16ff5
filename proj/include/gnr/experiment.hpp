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

#ifndef GNR_EXPERIMENT_HPP
#define GNR_EXPERIMENT_HPP

// Multi-seed benchmark: for each seed, generate (or take) complete data, apply
// each missingness setting, standardize with the complete-data statistics,
// fit every method and score it on the missing entries.

#include "gnr/baselines.hpp"
#include "gnr/config.hpp"
#include "gnr/eval.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gnr {

struct ExperimentSpec {
  SynthSpec synth;
  /// Complete data shared by every seed; synthetic data per seed when unset.
  std::optional<CompleteMatrix> data;
  std::vector<MissingSpec> settings;
  std::vector<Method> methods;
  std::vector<std::uint64_t> seeds;
  GnrConfig model;
  double threshold = 0.5;
};

struct CellResult {
  std::string method;
  std::string setting;
  std::uint64_t seed = 0;
  double rmse = 0.0;
  double mse = 0.0;
  /// NaN when no feature has a missing entry.
  double mask_accuracy = 0.0;
  double rmse_raw = 0.0;
  double runtime = 0.0;
  bool failed = false;
  std::string error;
};

struct ExperimentResult {
  EvalReport report;
  std::vector<CellResult> cells;
};

/// Cells run in the order seed, setting, method. A cell that throws is
/// recorded as failed with its message and excluded from the aggregates.
ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::function<void(const CellResult&)>& on_cell = {});

EvalReport aggregate(const std::vector<CellResult>& cells, const std::vector<MissingSpec>& settings,
                     const std::vector<Method>& methods);

/// One line per cell; runtime is left out so the file is reproducible.
void write_cells_csv(std::ostream& out, const std::vector<CellResult>& cells);

}  // namespace gnr

#endif  // GNR_EXPERIMENT_HPP

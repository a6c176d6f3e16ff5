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

#ifndef GNR_PIPELINE_HPP
#define GNR_PIPELINE_HPP

// End-to-end steps shared by the C API and the command-line tool.

#include "gnr/checkpoint.hpp"
#include "gnr/config.hpp"
#include "gnr/experiment.hpp"
#include "gnr/io.hpp"

#include <filesystem>

namespace gnr {

struct SynthOutput {
  CompleteMatrix truth;
  Mask mask;
  IncompleteMatrix observed;
  std::vector<std::string> feature_names;
};

/// Complete data and mask for `synth.*` and `missing.*`, seeded by model.seed.
/// Uses the same streams as one seed of run_experiment.
SynthOutput synthesize(const RunConfig& run);

/// Loads data.path in the configured format.
Dataset load_dataset(const RunConfig& run);

struct FitResult {
  Checkpoint checkpoint;
  TrainingLog log;
};

/// Fits run.method. Model-based methods are trained on data standardized with
/// its observed statistics when data.standardize is set.
FitResult fit(const Dataset& data, const RunConfig& run);

/// Imputes `data` in its original units; observed entries are copied from the
/// input. Throws ErrorCode::consistency when the feature count differs from the
/// checkpoint.
ImputationResult impute_with(const Checkpoint& checkpoint, const IncompleteMatrix& data);

/// Benchmark plan: synthetic data per seed, or the complete matrix at
/// data.path shared across seeds.
ExperimentSpec experiment_spec(const RunConfig& run);

inline constexpr const char* kEchoFile = "config.echo";

void write_echo(const std::filesystem::path& dir, const RunConfig& run);
void write_training_log(const std::filesystem::path& path, const TrainingLog& log);
/// report.csv, cells.csv and timing.csv.
void write_bench_outputs(const std::filesystem::path& dir, const ExperimentResult& result);

}  // namespace gnr

#endif  // GNR_PIPELINE_HPP

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

#ifndef GNR_CHECKPOINT_HPP
#define GNR_CHECKPOINT_HPP

// Fitted-model persistence. Text layout, one item per line:
//
//   gnr-checkpoint 1
//   method = gnr
//   features = 4
//   feature_names = x1,x2,x3,x4
//   model.<key> = <value>            (every model key, fixed order)
//   stats.mean = <hex> ...           (optional, standardization statistics)
//   stats.std = <hex> ...
//   feature_means = <hex> ...        (mean imputer only)
//   tensors = <count>
//   tensor <rows> <cols> <hex> ...   (canonical parameter order)
//   end
//
// Reals are C99 hexadecimal floats, so save/load is bit-exact.

#include "gnr/baselines.hpp"
#include "gnr/model.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gnr {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  Method method = Method::gnr;
  std::size_t features = 0;
  std::vector<std::string> feature_names;
  GnrConfig config;
  std::optional<FeatureStats> stats;
  /// Absent for the mean imputer.
  std::optional<GnrParams> params;
  Vector feature_means;
};

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in, const std::string& source = "<checkpoint>");
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string format_hex(double v);

}  // namespace gnr

#endif  // GNR_CHECKPOINT_HPP

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

#ifndef GNR_CONFIG_HPP
#define GNR_CONFIG_HPP

// Flat `key = value` configuration. Lines starting with '#' are comments;
// nested settings use dotted keys such as `missing.kind`. Later assignments
// (including command-line overrides) replace earlier ones.

#include "gnr/baselines.hpp"
#include "gnr/mask_synth.hpp"
#include "gnr/model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gnr {

class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  /// Applies a "key=value" override.
  void set_assignment(const std::string& assignment);
  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }
  /// Sorted `key = value` lines; parse(echo()) reproduces the config.
  std::string echo() const;

 private:
  std::map<std::string, std::string> entries_;
};

struct SynthSpec {
  std::size_t rows = 2000;
  std::size_t features = 4;
  /// Off-diagonal correlation used when no explicit covariance is given.
  double correlation = 0.5;
  Vector mean;  // empty = zeros
  Tensor cov;   // empty = equicorrelated
  Vector resolved_mean() const;
  Tensor resolved_cov() const;
};

enum class DataFormat { matrix, triplets };

struct RunConfig {
  GnrConfig model;
  Method method = Method::gnr;
  MissingSpec missing;
  SynthSpec synth;

  std::string data_path;
  DataFormat data_format = DataFormat::matrix;
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  int r_max = 5;
  bool rating_train_mode = true;
  bool standardize = true;

  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::vector<Method> bench_methods{Method::gnr, Method::miwae_alpha0, Method::serial_selection, Method::mean};
  std::vector<MissingSpec> bench_settings;
  double mask_threshold = 0.5;
  std::size_t histogram_bins = 0;
  std::string output_dir = "out";
};

/// Validates every key; unknown keys and malformed values raise
/// ErrorCode::parse naming the key.
RunConfig resolve(const KeyValueConfig& config);

/// Model keys (model.*) for a configuration, in a fixed order.
std::vector<std::pair<std::string, std::string>> model_entries(const GnrConfig& config);
/// Applies one model.* key; returns false when the key is not a model key.
bool apply_model_key(GnrConfig& config, const std::string& key, const std::string& value);

/// Every key of a resolved configuration, defaults included.
std::vector<std::pair<std::string, std::string>> resolved_entries(const RunConfig& run);
/// `key = value` lines of resolved_entries; resolving them again yields the
/// same configuration.
std::string echo(const RunConfig& run);

/// Shortest decimal text that parses back to the same double.
std::string format_real(double v);
std::string join(const std::vector<std::string>& parts, char sep);

}  // namespace gnr

#endif  // GNR_CONFIG_HPP

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

#ifndef GNR_IO_HPP
#define GNR_IO_HPP

// Dataset files.
//
// Matrix CSV: a header row of feature names, then one row per sample. An empty
// cell is missing; `NA` and `nan` (any case) are accepted as missing on read
// and never written. Reals are written with 17 significant digits.
//
// Triplet CSV: `user_id,item_id,rating` per line with 0-based ids and integer
// ratings in [1, r_max]; a header line is optional.

#include "gnr/missing.hpp"
#include "gnr/rng.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gnr {

struct Dataset {
  IncompleteMatrix data;
  std::vector<std::string> feature_names;
};

std::vector<std::string> default_feature_names(std::size_t d);

Dataset parse_matrix_csv(std::istream& in, const std::string& source = "<csv>");
Dataset load_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(std::ostream& out, const IncompleteMatrix& data, const std::vector<std::string>& names);
void write_matrix_csv(const std::filesystem::path& path, const IncompleteMatrix& data,
                      const std::vector<std::string>& names);
void write_matrix_csv(const std::filesystem::path& path, const Tensor& values, const std::vector<std::string>& names);

enum class RatingMode { train, test };

/// User x item matrix of transformed ratings; unrated cells are missing. In
/// train mode each rating gets its own noise level epsilon ~ N(0, 0.1^2); in
/// test mode epsilon = 0.
IncompleteMatrix parse_triplets(std::istream& in, std::size_t n_users, std::size_t n_items, int r_max,
                                RatingMode mode, SeededRng& rng, const std::string& source = "<triplets>");
IncompleteMatrix load_triplets(const std::filesystem::path& path, std::size_t n_users, std::size_t n_items,
                               int r_max, RatingMode mode, SeededRng& rng);

inline constexpr double kRatingNoiseStd = 0.1;

void ensure_directory(const std::filesystem::path& dir);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace gnr

#endif  // GNR_IO_HPP

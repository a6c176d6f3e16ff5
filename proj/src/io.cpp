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

#include "gnr/io.hpp"

#include "gnr/config.hpp"
#include "gnr/error.hpp"
#include "gnr/eval.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

namespace gnr {

namespace {

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || std::isspace(static_cast<unsigned char>(s.back())))) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  return s.substr(b);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(strip(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool is_missing_token(const std::string& cell) {
  std::string lower = cell;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  return lower.empty() || lower == "na" || lower == "nan";
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  try {
    std::size_t used = 0;
    out = std::stod(text, &used);
    return used == text.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_integer(const std::string& text, long long& out) {
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && !text.empty();
}

[[noreturn]] void parse_error(const std::string& source, std::size_t line, std::size_t column, const std::string& what) {
  std::string where = source + ":" + std::to_string(line);
  if (column > 0) where += ":" + std::to_string(column);
  fail(ErrorCode::parse, where + ": " + what);
}

}  // namespace

std::vector<std::string> default_feature_names(std::size_t d) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < d; ++j) names.push_back("x" + std::to_string(j + 1));
  return names;
}

Dataset parse_matrix_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!strip(line).empty()) {
      header = split_line(strip(line));
      break;
    }
  }
  if (header.empty()) parse_error(source, std::max<std::size_t>(line_no, 1), 0, "empty file");
  const std::size_t d = header.size();
  std::vector<double> values;
  std::vector<std::uint8_t> observed;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = strip(line);
    if (text.empty()) continue;
    const auto cells = split_line(text);
    if (cells.size() != d)
      parse_error(source, line_no, 0, "expected " + std::to_string(d) + " cells, found " + std::to_string(cells.size()));
    for (std::size_t j = 0; j < d; ++j) {
      double v = 0.0;
      if (is_missing_token(cells[j])) {
        values.push_back(0.0);
        observed.push_back(0);
      } else if (parse_double(cells[j], v)) {
        values.push_back(v);
        observed.push_back(1);
      } else {
        parse_error(source, line_no, j + 1, "non-numeric cell '" + cells[j] + "'");
      }
    }
    ++rows;
  }
  if (rows == 0) parse_error(source, line_no, 0, "no data rows");
  const auto r = static_cast<Eigen::Index>(rows);
  const auto c = static_cast<Eigen::Index>(d);
  Tensor t = Eigen::Map<const Tensor>(values.data(), r, c);
  Mask::Bits bits = Eigen::Map<const Mask::Bits>(observed.data(), r, c);
  return {IncompleteMatrix(std::move(t), Mask(std::move(bits))), std::move(header)};
}

Dataset load_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());
  return parse_matrix_csv(in, path.string());
}

void write_matrix_csv(std::ostream& out, const IncompleteMatrix& data, const std::vector<std::string>& names) {
  if (names.size() != static_cast<std::size_t>(data.cols()))
    fail(ErrorCode::dimension, "feature-name count does not match column count");
  out << join(names, ',') << '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      if (j > 0) out << ',';
      if (data.observed(i, j)) out << format_real(data.raw_values()(i, j));
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::filesystem::path& path, const IncompleteMatrix& data,
                      const std::vector<std::string>& names) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  write_matrix_csv(out, data, names);
  if (!out) fail(ErrorCode::io, "write failed for " + path.string());
}

void write_matrix_csv(const std::filesystem::path& path, const Tensor& values, const std::vector<std::string>& names) {
  write_matrix_csv(path, IncompleteMatrix(values, Mask(values.rows(), values.cols(), true)), names);
}

IncompleteMatrix parse_triplets(std::istream& in, std::size_t n_users, std::size_t n_items, int r_max,
                                RatingMode mode, SeededRng& rng, const std::string& source) {
  if (n_users == 0 || n_items == 0) fail(ErrorCode::invalid_argument, "triplet matrix needs n_users, n_items > 0");
  if (r_max < 1) fail(ErrorCode::invalid_argument, "r_max must be >= 1");
  const auto users = static_cast<Eigen::Index>(n_users);
  const auto items = static_cast<Eigen::Index>(n_items);
  Tensor values = Tensor::Zero(users, items);
  Mask mask(users, items, false);
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = strip(line);
    if (text.empty()) continue;
    const auto cells = split_line(text);
    if (cells.size() != 3) parse_error(source, line_no, 0, "expected user_id,item_id,rating");
    long long user = 0;
    long long item = 0;
    long long rating = 0;
    const bool numeric = parse_integer(cells[0], user);
    if (first && !numeric) {
      first = false;
      continue;  // header
    }
    first = false;
    if (!numeric) parse_error(source, line_no, 1, "non-integer user id '" + cells[0] + "'");
    if (!parse_integer(cells[1], item)) parse_error(source, line_no, 2, "non-integer item id '" + cells[1] + "'");
    if (!parse_integer(cells[2], rating)) parse_error(source, line_no, 3, "non-integer rating '" + cells[2] + "'");
    if (user < 0 || user >= users) parse_error(source, line_no, 1, "user id out of range");
    if (item < 0 || item >= items) parse_error(source, line_no, 2, "item id out of range");
    if (rating < 1 || rating > r_max) parse_error(source, line_no, 3, "rating out of range");
    if (mask.observed(user, item)) parse_error(source, line_no, 0, "duplicate (user, item) pair");
    const double epsilon = mode == RatingMode::train ? kRatingNoiseStd * rng.normal() : 0.0;
    values(user, item) = rating_transform(static_cast<int>(rating), r_max, epsilon);
    mask.set(user, item, true);
  }
  return IncompleteMatrix(std::move(values), std::move(mask));
}

IncompleteMatrix load_triplets(const std::filesystem::path& path, std::size_t n_users, std::size_t n_items,
                               int r_max, RatingMode mode, SeededRng& rng) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());
  return parse_triplets(in, n_users, n_items, r_max, mode, rng, path.string());
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create directory " + dir.string() + ": " + ec.message());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::io, "write failed for " + path.string());
}

}  // namespace gnr

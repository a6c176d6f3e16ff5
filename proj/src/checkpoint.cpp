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

#include "gnr/checkpoint.hpp"

#include "gnr/config.hpp"
#include "gnr/error.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace gnr {

namespace {

std::string hex_list(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ' ';
    out += format_hex(v(i));
  }
  return out;
}

double parse_hex(const std::string& token, const std::string& where) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (token.empty() || end != begin + token.size()) fail(ErrorCode::parse, where + ": bad real '" + token + "'");
  return v;
}

class LineReader {
 public:
  LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  std::string next() {
    std::string line;
    if (!std::getline(in_, line)) fail(ErrorCode::parse, where() + ": unexpected end of checkpoint");
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  /// Reads `key = value` and checks the key.
  std::string expect(const std::string& key) {
    const std::string line = next();
    const std::string prefix = key + " = ";
    if (line.rfind(prefix, 0) != 0) fail(ErrorCode::parse, where() + ": expected '" + key + "'");
    return line.substr(prefix.size());
  }

  std::string where() const { return source_ + ":" + std::to_string(line_); }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
};

Vector parse_vector(const std::string& text, std::size_t expected, const std::string& where) {
  std::istringstream in(text);
  std::vector<double> values;
  std::string token;
  while (in >> token) values.push_back(parse_hex(token, where));
  if (values.size() != expected)
    fail(ErrorCode::parse, where + ": expected " + std::to_string(expected) + " values, found " +
                               std::to_string(values.size()));
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

std::string format_hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

void write_checkpoint(std::ostream& out, const Checkpoint& cp) {
  out << "gnr-checkpoint " << kCheckpointVersion << '\n';
  out << "method = " << to_string(cp.method) << '\n';
  out << "features = " << cp.features << '\n';
  out << "feature_names = " << join(cp.feature_names, ',') << '\n';
  for (const auto& [key, value] : model_entries(cp.config)) out << key << " = " << value << '\n';
  out << "stats = " << (cp.stats ? 1 : 0) << '\n';
  if (cp.stats) {
    out << "stats.mean = " << hex_list(cp.stats->mean) << '\n';
    out << "stats.std = " << hex_list(cp.stats->std) << '\n';
  }
  out << "feature_means = " << hex_list(cp.feature_means) << '\n';
  std::size_t count = 0;
  if (cp.params) for_each_tensor(*cp.params, [&](const Tensor&) { ++count; });
  out << "tensors = " << count << '\n';
  if (cp.params) {
    for_each_tensor(*cp.params, [&](const Tensor& t) {
      out << "tensor " << t.rows() << ' ' << t.cols();
      for (Eigen::Index i = 0; i < t.size(); ++i) out << ' ' << format_hex(t.data()[i]);
      out << '\n';
    });
  }
  out << "end\n";
}

Checkpoint read_checkpoint(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  const std::string header = reader.next();
  if (header != "gnr-checkpoint " + std::to_string(kCheckpointVersion))
    fail(ErrorCode::parse, reader.where() + ": not a version " + std::to_string(kCheckpointVersion) + " checkpoint");
  Checkpoint cp;
  try {
    cp.method = parse_method(reader.expect("method"));
    cp.features = static_cast<std::size_t>(std::stoull(reader.expect("features")));
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorCode::parse, reader.where() + ": malformed header field");
  }
  if (cp.features == 0) fail(ErrorCode::parse, reader.where() + ": zero features");
  {
    std::istringstream names(reader.expect("feature_names"));
    std::string name;
    while (std::getline(names, name, ',')) cp.feature_names.push_back(name);
    if (cp.feature_names.size() != cp.features) fail(ErrorCode::parse, reader.where() + ": feature-name count");
  }
  for (const auto& [key, unused] : model_entries(GnrConfig{})) {
    const std::string value = reader.expect(key);
    try {
      apply_model_key(cp.config, key, value);
    } catch (const Error& e) {
      fail(ErrorCode::parse, reader.where() + ": " + e.what());
    }
  }
  cp.config.validate();
  const std::string has_stats = reader.expect("stats");
  if (has_stats == "1") {
    FeatureStats stats;
    stats.mean = parse_vector(reader.expect("stats.mean"), cp.features, reader.where());
    stats.std = parse_vector(reader.expect("stats.std"), cp.features, reader.where());
    cp.stats = std::move(stats);
  } else if (has_stats != "0") {
    fail(ErrorCode::parse, reader.where() + ": stats flag must be 0 or 1");
  }
  {
    const std::string text = reader.expect("feature_means");
    cp.feature_means = parse_vector(text, text.empty() ? 0 : cp.features, reader.where());
  }
  std::size_t count = 0;
  try {
    count = static_cast<std::size_t>(std::stoull(reader.expect("tensors")));
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorCode::parse, reader.where() + ": malformed tensor count");
  }
  if (count > 0) {
    SeededRng shape_rng(0);
    GnrParams params = init_params(cp.config, cp.features, shape_rng);
    std::size_t expected = 0;
    for_each_tensor(params, [&](Tensor&) { ++expected; });
    if (expected != count) fail(ErrorCode::parse, reader.where() + ": tensor count does not match the configuration");
    for_each_tensor(params, [&](Tensor& t) {
      std::istringstream line(reader.next());
      std::string tag;
      Eigen::Index rows = 0;
      Eigen::Index cols = 0;
      if (!(line >> tag >> rows >> cols) || tag != "tensor")
        fail(ErrorCode::parse, reader.where() + ": expected 'tensor <rows> <cols>'");
      if (rows != t.rows() || cols != t.cols()) fail(ErrorCode::parse, reader.where() + ": tensor shape mismatch");
      std::string token;
      for (Eigen::Index i = 0; i < t.size(); ++i) {
        if (!(line >> token)) fail(ErrorCode::parse, reader.where() + ": too few tensor values");
        t.data()[i] = parse_hex(token, reader.where());
      }
      if (line >> token) fail(ErrorCode::parse, reader.where() + ": too many tensor values");
    });
    cp.params = std::move(params);
  }
  if (reader.next() != "end") fail(ErrorCode::parse, reader.where() + ": expected 'end'");
  if (cp.method != Method::mean && !cp.params) fail(ErrorCode::parse, source + ": model checkpoint without parameters");
  if (cp.method == Method::mean && cp.feature_means.size() != static_cast<Eigen::Index>(cp.features))
    fail(ErrorCode::parse, source + ": mean-imputer checkpoint without feature means");
  return cp;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  write_checkpoint(out, checkpoint);
  if (!out) fail(ErrorCode::io, "write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());
  return read_checkpoint(in, path.string());
}

}  // namespace gnr

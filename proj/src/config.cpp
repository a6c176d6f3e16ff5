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

#include "gnr/config.hpp"

#include "gnr/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gnr {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream in(s);
  for (std::string part; std::getline(in, part, sep);) out.push_back(trim(part));
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  fail(ErrorCode::parse, "config key '" + key + "': expected " + expected + ", got '" + value + "'");
}

double to_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  bad_value(key, value, "a real number");
}

std::uint64_t to_count(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end) bad_value(key, value, "a non-negative integer");
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value, "true or false");
}

std::vector<std::size_t> to_counts(const std::string& key, const std::string& value) {
  std::vector<std::size_t> out;
  for (const auto& part : split(value, ',')) out.push_back(static_cast<std::size_t>(to_count(key, part)));
  return out;
}

std::vector<double> to_reals(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& part : split(value, ',')) out.push_back(to_real(key, part));
  return out;
}

template <class T>
std::string join_numbers(const std::vector<T>& values) {
  std::vector<std::string> parts;
  for (const auto& v : values) {
    if constexpr (std::is_floating_point_v<T>) {
      parts.push_back(format_real(v));
    } else {
      parts.push_back(std::to_string(v));
    }
  }
  return join(parts, ',');
}

// Converts parse-level failures of enum-like values into config errors.
template <class F>
auto keyed(const std::string& key, F&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    fail(ErrorCode::parse, "config key '" + key + "': " + e.what());
  }
}

}  // namespace

std::string format_real(double v) {
  // Shortest text that parses back to the same double.
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
  KeyValueConfig config;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::parse, source + ":" + std::to_string(number) + ": expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    if (key.empty()) fail(ErrorCode::parse, source + ":" + std::to_string(number) + ": empty key");
    config.set(key, trim(text.substr(eq + 1)));
  }
  return config;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open config file " + path.string());
  return parse(in, path.string());
}

void KeyValueConfig::set(const std::string& key, const std::string& value) { entries_[trim(key)] = trim(value); }

void KeyValueConfig::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty())
    fail(ErrorCode::parse, "override '" + assignment + "' is not of the form key=value");
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::echo() const {
  std::ostringstream out;
  for (const auto& [key, value] : entries_) out << key << " = " << value << '\n';
  return out.str();
}

Vector SynthSpec::resolved_mean() const {
  return mean.size() > 0 ? mean : Vector(Vector::Zero(static_cast<Eigen::Index>(features)));
}

Tensor SynthSpec::resolved_cov() const { return cov.size() > 0 ? cov : equicorrelated_cov(features, correlation); }

std::vector<std::pair<std::string, std::string>> model_entries(const GnrConfig& c) {
  return {
      {"model.latent_dim", std::to_string(c.latent_dim)},
      {"model.hidden_sizes", join_numbers(c.hidden_sizes)},
      {"model.K", std::to_string(c.importance_samples)},
      {"model.L", std::to_string(c.imputation_samples)},
      {"model.alpha", format_real(c.alpha)},
      {"model.learning_rate", format_real(c.learning_rate)},
      {"model.iterations", std::to_string(c.iterations)},
      {"model.batch_size", std::to_string(c.batch_size)},
      {"model.encoder", to_string(c.encoder)},
      {"model.embedding_size", std::to_string(c.embedding_size)},
      {"model.code_size", std::to_string(c.code_size)},
      {"model.mask_pathway", to_string(c.mask_pathway)},
      {"model.rating_mode", c.rating_mode ? "true" : "false"},
      {"model.rating_low", format_real(c.rating_low)},
      {"model.rating_high", format_real(c.rating_high)},
      {"model.seed", std::to_string(c.seed)},
      {"model.log_interval", std::to_string(c.log_interval)},
  };
}

bool apply_model_key(GnrConfig& c, const std::string& key, const std::string& value) {
  if (key == "model.latent_dim") c.latent_dim = to_count(key, value);
  else if (key == "model.hidden_sizes") c.hidden_sizes = to_counts(key, value);
  else if (key == "model.K") c.importance_samples = to_count(key, value);
  else if (key == "model.L") c.imputation_samples = to_count(key, value);
  else if (key == "model.alpha") c.alpha = to_real(key, value);
  else if (key == "model.learning_rate") c.learning_rate = to_real(key, value);
  else if (key == "model.iterations") c.iterations = to_count(key, value);
  else if (key == "model.batch_size") c.batch_size = to_count(key, value);
  else if (key == "model.encoder") c.encoder = keyed(key, [&] { return parse_encoder_variant(value); });
  else if (key == "model.embedding_size") c.embedding_size = to_count(key, value);
  else if (key == "model.code_size") c.code_size = to_count(key, value);
  else if (key == "model.mask_pathway") c.mask_pathway = keyed(key, [&] { return parse_mask_pathway(value); });
  else if (key == "model.rating_mode") c.rating_mode = to_bool(key, value);
  else if (key == "model.rating_low") c.rating_low = to_real(key, value);
  else if (key == "model.rating_high") c.rating_high = to_real(key, value);
  else if (key == "model.seed") c.seed = to_count(key, value);
  else if (key == "model.log_interval") c.log_interval = to_count(key, value);
  else return false;
  return true;
}

RunConfig resolve(const KeyValueConfig& config) {
  RunConfig run;
  bool bench_settings_given = false;
  for (const auto& [key, value] : config.entries()) {
    if (apply_model_key(run.model, key, value)) continue;
    if (key == "run.method") run.method = keyed(key, [&] { return parse_method(value); });
    else if (key == "missing.kind") run.missing.kind = keyed(key, [&] { return parse_missing_kind(value); });
    else if (key == "missing.k") run.missing.probability = to_real(key, value);
    else if (key == "missing.features") run.missing.features = to_counts(key, value);
    else if (key == "missing.mcar_probability") run.missing.mcar_probability = to_real(key, value);
    else if (key == "synth.n") run.synth.rows = to_count(key, value);
    else if (key == "synth.d") run.synth.features = to_count(key, value);
    else if (key == "synth.correlation") run.synth.correlation = to_real(key, value);
    else if (key == "synth.mean") {
      const auto v = to_reals(key, value);
      run.synth.mean = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    } else if (key == "synth.cov") {
      const auto v = to_reals(key, value);
      const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
      if (d * d != static_cast<Eigen::Index>(v.size())) bad_value(key, value, "a square row-major matrix");
      run.synth.cov = Eigen::Map<const Tensor>(v.data(), d, d);
    } else if (key == "data.path") run.data_path = value;
    else if (key == "data.format") {
      if (value == "matrix") run.data_format = DataFormat::matrix;
      else if (value == "triplets") run.data_format = DataFormat::triplets;
      else bad_value(key, value, "matrix or triplets");
    } else if (key == "data.n_users") run.n_users = to_count(key, value);
    else if (key == "data.n_items") run.n_items = to_count(key, value);
    else if (key == "data.r_max") run.r_max = static_cast<int>(to_count(key, value));
    else if (key == "data.mode") {
      if (value == "train") run.rating_train_mode = true;
      else if (value == "test") run.rating_train_mode = false;
      else bad_value(key, value, "train or test");
    } else if (key == "data.standardize") run.standardize = to_bool(key, value);
    else if (key == "bench.seeds") {
      run.seeds.clear();
      for (const auto s : to_counts(key, value)) run.seeds.push_back(s);
    } else if (key == "bench.methods") {
      run.bench_methods.clear();
      for (const auto& m : split(value, ',')) run.bench_methods.push_back(keyed(key, [&] { return parse_method(m); }));
    } else if (key == "bench.settings") {
      run.bench_settings.clear();
      for (const auto& s : split(value, ',')) run.bench_settings.push_back(keyed(key, [&] { return parse_missing_label(s); }));
      bench_settings_given = true;
    } else if (key == "eval.threshold") run.mask_threshold = to_real(key, value);
    else if (key == "output.dir") run.output_dir = value;
    else if (key == "output.histogram_bins") run.histogram_bins = to_count(key, value);
    else fail(ErrorCode::parse, "unknown config key '" + key + "'");
  }
  if (!bench_settings_given) run.bench_settings = {run.missing};
  for (auto& setting : run.bench_settings) {
    if (setting.features.empty()) setting.features = run.missing.features;
  }
  if (run.synth.mean.size() > 0 && static_cast<std::size_t>(run.synth.mean.size()) != run.synth.features)
    fail(ErrorCode::parse, "synth.mean length does not match synth.d");
  if (run.synth.cov.size() > 0 && static_cast<std::size_t>(run.synth.cov.rows()) != run.synth.features)
    fail(ErrorCode::parse, "synth.cov shape does not match synth.d");
  if (!(run.mask_threshold > 0.0 && run.mask_threshold < 1.0))
    fail(ErrorCode::parse, "eval.threshold must lie in (0, 1)");
  keyed("model.*", [&] { run.model.validate(); return 0; });
  return run;
}

std::vector<std::pair<std::string, std::string>> resolved_entries(const RunConfig& run) {
  auto entries = model_entries(run.model);
  const auto add = [&](const std::string& key, const std::string& value) { entries.emplace_back(key, value); };
  add("run.method", to_string(run.method));
  add("missing.kind", to_string(run.missing.kind));
  add("missing.k", format_real(run.missing.probability));
  add("missing.features", join_numbers(run.missing.features));
  add("missing.mcar_probability", format_real(run.missing.mcar_probability));
  add("synth.n", std::to_string(run.synth.rows));
  add("synth.d", std::to_string(run.synth.features));
  add("synth.correlation", format_real(run.synth.correlation));
  if (run.synth.mean.size() > 0)
    add("synth.mean", join_numbers(std::vector<double>(run.synth.mean.data(), run.synth.mean.data() + run.synth.mean.size())));
  if (run.synth.cov.size() > 0)
    add("synth.cov", join_numbers(std::vector<double>(run.synth.cov.data(), run.synth.cov.data() + run.synth.cov.size())));
  if (!run.data_path.empty()) add("data.path", run.data_path);
  add("data.format", run.data_format == DataFormat::matrix ? "matrix" : "triplets");
  add("data.n_users", std::to_string(run.n_users));
  add("data.n_items", std::to_string(run.n_items));
  add("data.r_max", std::to_string(run.r_max));
  add("data.mode", run.rating_train_mode ? "train" : "test");
  add("data.standardize", run.standardize ? "true" : "false");
  add("bench.seeds", join_numbers(run.seeds));
  std::vector<std::string> methods;
  for (const Method m : run.bench_methods) methods.push_back(to_string(m));
  add("bench.methods", join(methods, ','));
  std::vector<std::string> settings;
  for (const auto& s : run.bench_settings) settings.push_back(s.label());
  add("bench.settings", join(settings, ','));
  add("eval.threshold", format_real(run.mask_threshold));
  add("output.dir", run.output_dir);
  add("output.histogram_bins", std::to_string(run.histogram_bins));
  return entries;
}

std::string echo(const RunConfig& run) {
  std::ostringstream out;
  out << "# resolved configuration\n";
  for (const auto& [key, value] : resolved_entries(run)) out << key << " = " << value << '\n';
  return out.str();
}

}  // namespace gnr

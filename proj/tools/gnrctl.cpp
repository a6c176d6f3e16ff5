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

// Command-line front end over the C API.
//
//   gnrctl synth  [--config F] [--set k=v]... [--out DIR]
//   gnrctl train  [--config F] [--set k=v]... [--data CSV] [--out DIR]
//   gnrctl impute --model CKPT --data CSV [--config F] [--set k=v]... [--out DIR]
//   gnrctl eval   --truth CSV --observed CSV --completed CSV [--prob CSV] [--out DIR]
//   gnrctl bench  [--config F] [--set k=v]... [--out DIR]
//
// The output directory is --out, else $GNR_OUTPUT_DIR, else output.dir.
// Exit status: 0 success, 1 library error, 2 usage error.

#include "gnr/gnr.h"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

struct Failure : std::runtime_error {
  explicit Failure(const std::string& what) : std::runtime_error(what) {}
};

void check(gnr_status status, const char* action) {
  if (status != GNR_OK)
    throw Failure(std::string(action) + ": " + gnr_status_string(status) + ": " + gnr_last_error());
}

template <class T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using ConfigPtr = std::unique_ptr<gnr_config, Deleter<gnr_config, gnr_config_destroy>>;
using DatasetPtr = std::unique_ptr<gnr_dataset, Deleter<gnr_dataset, gnr_dataset_destroy>>;
using ModelPtr = std::unique_ptr<gnr_model, Deleter<gnr_model, gnr_model_destroy>>;
using ImputationPtr = std::unique_ptr<gnr_imputation, Deleter<gnr_imputation, gnr_imputation_destroy>>;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config,-c", opts.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--set,-s", opts.overrides, "override one key, as key=value")->take_all();
  cmd->add_option("--out,-o", opts.out_dir, "output directory");
}

ConfigPtr build_config(const CommonOptions& opts) {
  gnr_config* raw = nullptr;
  if (opts.config_path.empty()) {
    check(gnr_config_create(&raw), "config");
  } else {
    check(gnr_config_load(opts.config_path.c_str(), &raw), "config");
  }
  ConfigPtr config(raw);
  for (const auto& assignment : opts.overrides) check(gnr_config_assign(config.get(), assignment.c_str()), "--set");
  std::string dir = opts.out_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("GNR_OUTPUT_DIR"); env != nullptr && *env != '\0') dir = env;
  }
  if (!dir.empty()) check(gnr_config_set(config.get(), "output.dir", dir.c_str()), "output directory");
  check(gnr_config_validate(config.get()), "config");
  return config;
}

std::string get_key(const gnr_config* config, const char* key) {
  std::size_t needed = 0;
  check(gnr_config_get(config, key, nullptr, 0, &needed), key);
  std::string value(needed, '\0');
  check(gnr_config_get(config, key, value.data(), value.size(), nullptr), key);
  value.resize(needed - 1);
  return value;
}

std::filesystem::path output_dir(const gnr_config* config) {
  std::filesystem::path dir = get_key(config, "output.dir");
  check(gnr_config_write_echo(config, dir.string().c_str()), "config echo");
  return dir;
}

DatasetPtr load_csv(const std::string& path) {
  gnr_dataset* raw = nullptr;
  check(gnr_dataset_load_csv(path.c_str(), &raw), "load");
  return DatasetPtr(raw);
}

int run_synth(const CommonOptions& opts) {
  auto config = build_config(opts);
  const auto dir = output_dir(config.get());
  check(gnr_synth(config.get(), dir.string().c_str(), nullptr, nullptr), "synth");
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

int run_train(const CommonOptions& opts, const std::string& data_path) {
  auto config = build_config(opts);
  if (!data_path.empty()) check(gnr_config_set(config.get(), "data.path", data_path.c_str()), "--data");
  const auto dir = output_dir(config.get());
  gnr_dataset* data_raw = nullptr;
  check(gnr_dataset_from_config(config.get(), &data_raw), "load");
  DatasetPtr data(data_raw);
  gnr_model* model_raw = nullptr;
  check(gnr_model_train(config.get(), data.get(), &model_raw), "train");
  ModelPtr model(model_raw);
  check(gnr_model_save(model.get(), (dir / "model.ckpt").string().c_str()), "save");
  check(gnr_model_write_training_log(model.get(), (dir / "training_log.csv").string().c_str()), "training log");
  std::printf("wrote %s\n", (dir / "model.ckpt").string().c_str());
  return 0;
}

int run_impute(const CommonOptions& opts, const std::string& model_path, const std::string& data_path) {
  auto config = build_config(opts);
  const auto dir = output_dir(config.get());
  gnr_model* model_raw = nullptr;
  check(gnr_model_load(model_path.c_str(), &model_raw), "load model");
  ModelPtr model(model_raw);
  auto data = load_csv(data_path);
  gnr_imputation* imp_raw = nullptr;
  check(gnr_model_impute(model.get(), data.get(), &imp_raw), "impute");
  ImputationPtr imp(imp_raw);
  check(gnr_imputation_write(imp.get(), (dir / "completed.csv").string().c_str(),
                             (dir / "mask_prob.csv").string().c_str()),
        "write");
  std::printf("wrote %s\n", (dir / "completed.csv").string().c_str());
  return 0;
}

int run_eval(const CommonOptions& opts, const std::string& truth_path, const std::string& observed_path,
             const std::string& completed_path, const std::string& prob_path, double threshold) {
  auto truth = load_csv(truth_path);
  auto observed = load_csv(observed_path);
  auto completed = load_csv(completed_path);
  double rmse = 0.0;
  double mse = 0.0;
  check(gnr_evaluate(truth.get(), observed.get(), completed.get(), &rmse, &mse), "eval");
  std::string table = "metric,value\n";
  char line[128];
  std::snprintf(line, sizeof line, "rmse,%.17g\nmse,%.17g\n", rmse, mse);
  table += line;
  if (!prob_path.empty()) {
    auto prob = load_csv(prob_path);
    double accuracy = 0.0;
    check(gnr_evaluate_mask(observed.get(), prob.get(), threshold, &accuracy), "eval");
    std::snprintf(line, sizeof line, "mask_accuracy,%.17g\n", accuracy);
    table += line;
  }
  std::fputs(table.c_str(), stdout);
  if (!opts.out_dir.empty() || std::getenv("GNR_OUTPUT_DIR") != nullptr || !opts.config_path.empty()) {
    auto config = build_config(opts);
    const auto dir = output_dir(config.get());
    std::ofstream out(dir / "eval.csv");
    if (!(out << table)) throw Failure("eval: cannot write " + (dir / "eval.csv").string());
  }
  return 0;
}

int run_bench(const CommonOptions& opts) {
  auto config = build_config(opts);
  const auto dir = output_dir(config.get());
  check(gnr_bench(config.get(), dir.string().c_str()), "bench");
  std::printf("wrote %s\n", (dir / "report.csv").string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep generative imputation for data missing not at random"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gnr_version());

  CommonOptions synth_opts, train_opts, impute_opts, eval_opts, bench_opts;
  std::string train_data, model_path, impute_data, truth_path, observed_path, completed_path, prob_path;
  double threshold = 0.5;

  auto* synth = app.add_subcommand("synth", "generate complete data and a missingness mask");
  add_common(synth, synth_opts);

  auto* train = app.add_subcommand("train", "fit a model and write a checkpoint");
  add_common(train, train_opts);
  train->add_option("--data,-d", train_data, "matrix CSV (overrides data.path)");

  auto* impute = app.add_subcommand("impute", "complete a dataset with a checkpoint");
  add_common(impute, impute_opts);
  impute->add_option("--model,-m", model_path, "checkpoint file")->required()->check(CLI::ExistingFile);
  impute->add_option("--data,-d", impute_data, "matrix CSV to complete")->required()->check(CLI::ExistingFile);

  auto* eval = app.add_subcommand("eval", "score a completed CSV against the truth");
  add_common(eval, eval_opts);
  eval->add_option("--truth", truth_path, "complete ground-truth CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--observed", observed_path, "CSV whose empty cells mark the scored entries")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--completed", completed_path, "completed CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--prob", prob_path, "probabilistic-mask CSV")->check(CLI::ExistingFile);
  eval->add_option("--threshold", threshold, "mask discretization threshold")->check(CLI::Range(0.0, 1.0));

  auto* bench = app.add_subcommand("bench", "run the multi-seed benchmark");
  add_common(bench, bench_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth) return run_synth(synth_opts);
    if (*train) return run_train(train_opts, train_data);
    if (*impute) return run_impute(impute_opts, model_path, impute_data);
    if (*eval) return run_eval(eval_opts, truth_path, observed_path, completed_path, prob_path, threshold);
    if (*bench) return run_bench(bench_opts);
  } catch (const Failure& e) {
    std::fprintf(stderr, "gnrctl: %s\n", e.what());
    return 1;
  }
  return 2;
}

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

#include "gnr/gnr.h"

#include "gnr/checkpoint.hpp"
#include "gnr/config.hpp"
#include "gnr/error.hpp"
#include "gnr/eval.hpp"
#include "gnr/experiment.hpp"
#include "gnr/io.hpp"
#include "gnr/pipeline.hpp"

#include <cstring>
#include <fstream>
#include <new>
#include <string>
#include <utility>

struct gnr_config {
  gnr::KeyValueConfig kv;
};

struct gnr_dataset {
  gnr::Dataset data;
};

struct gnr_model {
  gnr::Checkpoint checkpoint;
  gnr::TrainingLog log;
};

struct gnr_imputation {
  gnr::ImputationResult result;
  std::vector<std::string> feature_names;
};

namespace {

thread_local std::string g_last_error;

gnr_status status_of(gnr::ErrorCode code) {
  switch (code) {
    case gnr::ErrorCode::invalid_argument: return GNR_ERR_INVALID_ARGUMENT;
    case gnr::ErrorCode::dimension: return GNR_ERR_DIMENSION;
    case gnr::ErrorCode::domain: return GNR_ERR_DOMAIN;
    case gnr::ErrorCode::numeric: return GNR_ERR_NUMERIC;
    case gnr::ErrorCode::parse: return GNR_ERR_PARSE;
    case gnr::ErrorCode::consistency: return GNR_ERR_CONSISTENCY;
    case gnr::ErrorCode::degenerate_feature: return GNR_ERR_DEGENERATE_FEATURE;
    case gnr::ErrorCode::undefined_metric: return GNR_ERR_UNDEFINED_METRIC;
    case gnr::ErrorCode::io: return GNR_ERR_IO;
  }
  return GNR_ERR_INTERNAL;
}

template <class F>
gnr_status guarded(F&& fn) {
  g_last_error.clear();
  try {
    fn();
    return GNR_OK;
  } catch (const gnr::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return GNR_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GNR_ERR_INTERNAL;
  }
}

void need(const void* p, const char* name) {
  if (p == nullptr) gnr::fail(gnr::ErrorCode::invalid_argument, std::string(name) + " is NULL");
}

gnr::RunConfig resolved(const gnr_config* config) { return gnr::resolve(config->kv); }

gnr_dataset* wrap(gnr::Dataset d) { return new gnr_dataset{std::move(d)}; }

void check_entry(Eigen::Index rows, Eigen::Index cols, size_t row, size_t col) {
  if (row >= static_cast<size_t>(rows) || col >= static_cast<size_t>(cols))
    gnr::fail(gnr::ErrorCode::invalid_argument, "entry index out of range");
}

const gnr::CompleteMatrix& complete_values(const gnr_dataset* d, const char* name) {
  if (d->data.data.mask().count_missing() > 0)
    gnr::fail(gnr::ErrorCode::invalid_argument, std::string(name) + " must be fully observed");
  return d->data.data.raw_values();
}

}  // namespace

extern "C" {

const char* gnr_version(void) { return "0.1.0"; }

const char* gnr_status_string(gnr_status status) {
  switch (status) {
    case GNR_OK: return "ok";
    case GNR_ERR_INVALID_ARGUMENT: return "invalid argument";
    case GNR_ERR_DIMENSION: return "dimension mismatch";
    case GNR_ERR_DOMAIN: return "domain error";
    case GNR_ERR_NUMERIC: return "numeric error";
    case GNR_ERR_PARSE: return "parse error";
    case GNR_ERR_CONSISTENCY: return "consistency error";
    case GNR_ERR_DEGENERATE_FEATURE: return "degenerate feature";
    case GNR_ERR_UNDEFINED_METRIC: return "undefined metric";
    case GNR_ERR_IO: return "i/o error";
    case GNR_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* gnr_last_error(void) { return g_last_error.c_str(); }

gnr_status gnr_config_create(gnr_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new gnr_config{};
  });
}

gnr_status gnr_config_load(const char* path, gnr_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    auto kv = gnr::KeyValueConfig::load(path);
    *out = new gnr_config{std::move(kv)};
  });
}

gnr_status gnr_config_set(gnr_config* config, const char* key, const char* value) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    need(value, "value");
    config->kv.set(key, value);
  });
}

gnr_status gnr_config_assign(gnr_config* config, const char* assignment) {
  return guarded([&] {
    need(config, "config");
    need(assignment, "assignment");
    config->kv.set_assignment(assignment);
  });
}

gnr_status gnr_config_validate(const gnr_config* config) {
  return guarded([&] {
    need(config, "config");
    (void)resolved(config);
  });
}

gnr_status gnr_config_get(const gnr_config* config, const char* key, char* buf, size_t capacity, size_t* needed) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    std::string value;
    bool found = false;
    for (const auto& [k, v] : gnr::resolved_entries(resolved(config))) {
      if (k == key) {
        value = v;
        found = true;
      }
    }
    if (!found) gnr::fail(gnr::ErrorCode::invalid_argument, std::string("unknown config key '") + key + "'");
    if (needed != nullptr) *needed = value.size() + 1;
    if (buf != nullptr) {
      if (capacity < value.size() + 1) gnr::fail(gnr::ErrorCode::invalid_argument, "buffer too small");
      std::memcpy(buf, value.c_str(), value.size() + 1);
    }
  });
}

gnr_status gnr_config_write_echo(const gnr_config* config, const char* dir) {
  return guarded([&] {
    need(config, "config");
    need(dir, "dir");
    gnr::write_echo(dir, resolved(config));
  });
}

void gnr_config_destroy(gnr_config* config) { delete config; }

gnr_status gnr_dataset_create(size_t rows, size_t cols, const double* values, const uint8_t* observed,
                              gnr_dataset** out) {
  return guarded([&] {
    need(values, "values");
    need(observed, "observed");
    need(out, "out");
    if (rows == 0 || cols == 0) gnr::fail(gnr::ErrorCode::dimension, "dataset must have rows and columns");
    const auto r = static_cast<Eigen::Index>(rows);
    const auto c = static_cast<Eigen::Index>(cols);
    gnr::Tensor t = Eigen::Map<const gnr::Tensor>(values, r, c);
    gnr::Mask::Bits bits = Eigen::Map<const gnr::Mask::Bits>(observed, r, c);
    if ((bits.array() > 1).any()) gnr::fail(gnr::ErrorCode::invalid_argument, "observed flags must be 0 or 1");
    *out = wrap({gnr::IncompleteMatrix(std::move(t), gnr::Mask(std::move(bits))), gnr::default_feature_names(cols)});
  });
}

gnr_status gnr_dataset_load_csv(const char* path, gnr_dataset** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = wrap(gnr::load_matrix_csv(path));
  });
}

gnr_status gnr_dataset_load_triplets(const char* path, size_t n_users, size_t n_items, int r_max, int train_mode,
                                     uint64_t seed, gnr_dataset** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    gnr::SeededRng rng = gnr::SeededRng(seed).substream("ratings");
    auto m = gnr::load_triplets(path, n_users, n_items, r_max,
                                train_mode != 0 ? gnr::RatingMode::train : gnr::RatingMode::test, rng);
    std::vector<std::string> names;
    for (size_t j = 0; j < n_items; ++j) names.push_back("item" + std::to_string(j));
    *out = wrap({std::move(m), std::move(names)});
  });
}

gnr_status gnr_dataset_from_config(const gnr_config* config, gnr_dataset** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    *out = wrap(gnr::load_dataset(resolved(config)));
  });
}

gnr_status gnr_dataset_shape(const gnr_dataset* data, size_t* rows, size_t* cols) {
  return guarded([&] {
    need(data, "data");
    if (rows != nullptr) *rows = static_cast<size_t>(data->data.data.rows());
    if (cols != nullptr) *cols = static_cast<size_t>(data->data.data.cols());
  });
}

gnr_status gnr_dataset_get(const gnr_dataset* data, size_t row, size_t col, double* value, int* observed) {
  return guarded([&] {
    need(data, "data");
    const auto& m = data->data.data;
    check_entry(m.rows(), m.cols(), row, col);
    const auto i = static_cast<Eigen::Index>(row);
    const auto j = static_cast<Eigen::Index>(col);
    if (value != nullptr) *value = m.raw_values()(i, j);
    if (observed != nullptr) *observed = m.observed(i, j) ? 1 : 0;
  });
}

gnr_status gnr_dataset_write_csv(const gnr_dataset* data, const char* path) {
  return guarded([&] {
    need(data, "data");
    need(path, "path");
    gnr::write_matrix_csv(std::filesystem::path(path), data->data.data, data->data.feature_names);
  });
}

void gnr_dataset_destroy(gnr_dataset* data) { delete data; }

gnr_status gnr_synth(const gnr_config* config, const char* dir, gnr_dataset** truth, gnr_dataset** observed) {
  return guarded([&] {
    need(config, "config");
    const gnr::RunConfig run = resolved(config);
    gnr::SynthOutput s = gnr::synthesize(run);
    if (dir != nullptr) {
      const std::filesystem::path out(dir);
      gnr::write_echo(out, run);
      gnr::write_matrix_csv(out / "truth.csv", s.truth, s.feature_names);
      gnr::write_matrix_csv(out / "observed.csv", s.observed, s.feature_names);
      gnr::write_matrix_csv(out / "mask.csv", s.mask.as_tensor(), s.feature_names);
      if (run.histogram_bins > 0) {
        std::ofstream hist(out / "histogram.csv");
        if (!hist) gnr::fail(gnr::ErrorCode::io, "cannot write histogram.csv");
        gnr::write_histogram_csv(hist, s.truth, s.mask, s.feature_names, run.histogram_bins);
      }
    }
    gnr_dataset* t = nullptr;
    if (truth != nullptr) {
      const auto rows = s.truth.rows();
      const auto cols = s.truth.cols();
      t = wrap({gnr::IncompleteMatrix(s.truth, gnr::Mask(rows, cols, true)), s.feature_names});
    }
    if (observed != nullptr) *observed = wrap({std::move(s.observed), s.feature_names});
    if (truth != nullptr) *truth = t;
  });
}

gnr_status gnr_model_train(const gnr_config* config, const gnr_dataset* data, gnr_model** out) {
  return guarded([&] {
    need(config, "config");
    need(data, "data");
    need(out, "out");
    gnr::FitResult fitted = gnr::fit(data->data, resolved(config));
    *out = new gnr_model{std::move(fitted.checkpoint), std::move(fitted.log)};
  });
}

gnr_status gnr_model_save(const gnr_model* model, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    gnr::save_checkpoint(path, model->checkpoint);
  });
}

gnr_status gnr_model_load(const char* path, gnr_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new gnr_model{gnr::load_checkpoint(path), {}};
  });
}

gnr_status gnr_model_features(const gnr_model* model, size_t* features) {
  return guarded([&] {
    need(model, "model");
    need(features, "features");
    *features = model->checkpoint.features;
  });
}

gnr_status gnr_model_write_training_log(const gnr_model* model, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    gnr::write_training_log(path, model->log);
  });
}

gnr_status gnr_model_impute(const gnr_model* model, const gnr_dataset* data, gnr_imputation** out) {
  return guarded([&] {
    need(model, "model");
    need(data, "data");
    need(out, "out");
    auto result = gnr::impute_with(model->checkpoint, data->data.data);
    *out = new gnr_imputation{std::move(result), data->data.feature_names};
  });
}

void gnr_model_destroy(gnr_model* model) { delete model; }

gnr_status gnr_imputation_shape(const gnr_imputation* imp, size_t* rows, size_t* cols) {
  return guarded([&] {
    need(imp, "imputation");
    if (rows != nullptr) *rows = static_cast<size_t>(imp->result.imputed.rows());
    if (cols != nullptr) *cols = static_cast<size_t>(imp->result.imputed.cols());
  });
}

gnr_status gnr_imputation_get(const gnr_imputation* imp, size_t row, size_t col, double* value,
                              double* observed_probability) {
  return guarded([&] {
    need(imp, "imputation");
    const auto& x = imp->result.imputed;
    check_entry(x.rows(), x.cols(), row, col);
    const auto i = static_cast<Eigen::Index>(row);
    const auto j = static_cast<Eigen::Index>(col);
    if (value != nullptr) *value = x(i, j);
    if (observed_probability != nullptr) *observed_probability = imp->result.probabilistic_mask(i, j);
  });
}

gnr_status gnr_imputation_write(const gnr_imputation* imp, const char* completed_path, const char* mask_path) {
  return guarded([&] {
    need(imp, "imputation");
    if (completed_path != nullptr)
      gnr::write_matrix_csv(std::filesystem::path(completed_path), imp->result.imputed, imp->feature_names);
    if (mask_path != nullptr)
      gnr::write_matrix_csv(std::filesystem::path(mask_path), imp->result.probabilistic_mask, imp->feature_names);
  });
}

void gnr_imputation_destroy(gnr_imputation* imp) { delete imp; }

gnr_status gnr_evaluate(const gnr_dataset* truth, const gnr_dataset* observed, const gnr_dataset* completed,
                        double* rmse, double* mse) {
  return guarded([&] {
    need(truth, "truth");
    need(observed, "observed");
    need(completed, "completed");
    const auto& t = complete_values(truth, "truth");
    const auto& c = complete_values(completed, "completed");
    const double m = gnr::mse_missing(t, c, observed->data.data.mask());
    if (mse != nullptr) *mse = m;
    if (rmse != nullptr) *rmse = gnr::rmse_missing(t, c, observed->data.data.mask());
  });
}

gnr_status gnr_evaluate_mask(const gnr_dataset* observed, const gnr_dataset* probabilities, double threshold,
                             double* accuracy) {
  return guarded([&] {
    need(observed, "observed");
    need(probabilities, "probabilities");
    need(accuracy, "accuracy");
    const auto& mask = observed->data.data.mask();
    *accuracy = gnr::mask_accuracy(mask, complete_values(probabilities, "probabilities"), threshold,
                                   gnr::features_with_missing(mask));
  });
}

gnr_status gnr_bench(const gnr_config* config, const char* dir) {
  return guarded([&] {
    need(config, "config");
    const gnr::RunConfig run = resolved(config);
    const std::filesystem::path out = dir != nullptr ? std::filesystem::path(dir) : std::filesystem::path(run.output_dir);
    gnr::write_echo(out, run);
    const gnr::ExperimentResult result = gnr::run_experiment(gnr::experiment_spec(run));
    gnr::write_bench_outputs(out, result);
  });
}

}  // extern "C"

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

#ifndef GNR_GNR_H
#define GNR_GNR_H

/* C interface to the gnrimpute library.
 *
 * Objects are opaque handles created by gnr_*_create/load/train functions and
 * released with the matching gnr_*_destroy. Every fallible call returns a
 * gnr_status; on failure gnr_last_error() describes the problem for the
 * calling thread until its next library call. Output handles are only written
 * on success. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(GNR_BUILDING_LIBRARY)
#define GNR_API __declspec(dllexport)
#else
#define GNR_API __declspec(dllimport)
#endif
#else
#define GNR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gnr_status {
  GNR_OK = 0,
  GNR_ERR_INVALID_ARGUMENT = 1,
  GNR_ERR_DIMENSION = 2,
  GNR_ERR_DOMAIN = 3,
  GNR_ERR_NUMERIC = 4,
  GNR_ERR_PARSE = 5,
  GNR_ERR_CONSISTENCY = 6,
  GNR_ERR_DEGENERATE_FEATURE = 7,
  GNR_ERR_UNDEFINED_METRIC = 8,
  GNR_ERR_IO = 9,
  GNR_ERR_INTERNAL = 10
} gnr_status;

typedef struct gnr_config gnr_config;
typedef struct gnr_dataset gnr_dataset;
typedef struct gnr_model gnr_model;
typedef struct gnr_imputation gnr_imputation;

GNR_API const char* gnr_version(void);
GNR_API const char* gnr_status_string(gnr_status status);
GNR_API const char* gnr_last_error(void);

/* Configuration: flat key = value settings; see README for the keys. */
GNR_API gnr_status gnr_config_create(gnr_config** out);
GNR_API gnr_status gnr_config_load(const char* path, gnr_config** out);
GNR_API gnr_status gnr_config_set(gnr_config* config, const char* key, const char* value);
/* Applies "key=value". */
GNR_API gnr_status gnr_config_assign(gnr_config* config, const char* assignment);
/* Resolves and validates every key. */
GNR_API gnr_status gnr_config_validate(const gnr_config* config);
/* Copies the resolved value of a key (NUL-terminated) into buf. *needed
 * receives the required size including the terminator. */
GNR_API gnr_status gnr_config_get(const gnr_config* config, const char* key, char* buf, size_t capacity,
                                  size_t* needed);
/* Writes the resolved configuration to <dir>/config.echo. */
GNR_API gnr_status gnr_config_write_echo(const gnr_config* config, const char* dir);
GNR_API void gnr_config_destroy(gnr_config* config);

/* Datasets: a row-major values matrix with a row-major observed mask whose
 * entries are 1 (observed) or 0 (missing). */
GNR_API gnr_status gnr_dataset_create(size_t rows, size_t cols, const double* values, const uint8_t* observed,
                                      gnr_dataset** out);
GNR_API gnr_status gnr_dataset_load_csv(const char* path, gnr_dataset** out);
GNR_API gnr_status gnr_dataset_load_triplets(const char* path, size_t n_users, size_t n_items, int r_max,
                                             int train_mode, uint64_t seed, gnr_dataset** out);
/* Loads data.path from a configuration. */
GNR_API gnr_status gnr_dataset_from_config(const gnr_config* config, gnr_dataset** out);
GNR_API gnr_status gnr_dataset_shape(const gnr_dataset* data, size_t* rows, size_t* cols);
/* *observed is 1 or 0; *value is unspecified for missing entries. */
GNR_API gnr_status gnr_dataset_get(const gnr_dataset* data, size_t row, size_t col, double* value, int* observed);
GNR_API gnr_status gnr_dataset_write_csv(const gnr_dataset* data, const char* path);
GNR_API void gnr_dataset_destroy(gnr_dataset* data);

/* Synthetic complete data and its observed part for synth.* and missing.*.
 * With a non-NULL dir also writes truth.csv, observed.csv, mask.csv, the
 * config echo and, when output.histogram_bins > 0, histogram.csv. */
GNR_API gnr_status gnr_synth(const gnr_config* config, const char* dir, gnr_dataset** truth,
                             gnr_dataset** observed);

/* Fitting run.method on a dataset. */
GNR_API gnr_status gnr_model_train(const gnr_config* config, const gnr_dataset* data, gnr_model** out);
GNR_API gnr_status gnr_model_save(const gnr_model* model, const char* path);
GNR_API gnr_status gnr_model_load(const char* path, gnr_model** out);
GNR_API gnr_status gnr_model_features(const gnr_model* model, size_t* features);
/* CSV of iteration,bound; empty for models loaded from disk or the mean
 * imputer. */
GNR_API gnr_status gnr_model_write_training_log(const gnr_model* model, const char* path);
GNR_API gnr_status gnr_model_impute(const gnr_model* model, const gnr_dataset* data, gnr_imputation** out);
GNR_API void gnr_model_destroy(gnr_model* model);

GNR_API gnr_status gnr_imputation_shape(const gnr_imputation* imp, size_t* rows, size_t* cols);
/* Completed value and predicted observation probability of one entry. */
GNR_API gnr_status gnr_imputation_get(const gnr_imputation* imp, size_t row, size_t col, double* value,
                                      double* observed_probability);
/* Either path may be NULL. */
GNR_API gnr_status gnr_imputation_write(const gnr_imputation* imp, const char* completed_path,
                                        const char* mask_path);
GNR_API void gnr_imputation_destroy(gnr_imputation* imp);

/* Scores a completed matrix on the entries missing in `observed`. truth and
 * completed must be fully observed. Any output pointer may be NULL. */
GNR_API gnr_status gnr_evaluate(const gnr_dataset* truth, const gnr_dataset* observed, const gnr_dataset* completed,
                                double* rmse, double* mse);
/* Mask accuracy of a probability matrix (fully observed dataset) against the
 * mask of `observed`, over the features with a missing entry. */
GNR_API gnr_status gnr_evaluate_mask(const gnr_dataset* observed, const gnr_dataset* probabilities,
                                     double threshold, double* accuracy);

/* Runs the benchmark and writes report.csv, cells.csv, timing.csv and the
 * config echo into dir. */
GNR_API gnr_status gnr_bench(const gnr_config* config, const char* dir);

#ifdef __cplusplus
}
#endif

#endif /* GNR_GNR_H */

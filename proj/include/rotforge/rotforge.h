/*
 * Copyright 2026 The rotforge Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to rotforge. Every handle is opaque and owned by the caller
 * once returned; release it with the matching *_free function. Functions
 * return RF_OK or an error status, and rf_last_error() describes the most
 * recent failure on the calling thread. Strings returned through char** are
 * released with rf_string_free. */

#ifndef ROTFORGE_H
#define ROTFORGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(ROTFORGE_BUILDING)
#define RF_API __attribute__((visibility("default")))
#else
#define RF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rf_status {
  RF_OK = 0,
  RF_ERR_INVALID_ARGUMENT = 1,
  RF_ERR_IO = 2,
  RF_ERR_PARSE = 3,
  RF_ERR_UNSUPPORTED_ATTRIBUTE = 4,
  RF_ERR_MISSING_VALUE = 5,
  RF_ERR_NON_NUMERIC = 6,
  RF_ERR_RAGGED_ROWS = 7,
  RF_ERR_SINGLE_CLASS = 8,
  RF_ERR_DIMENSION_MISMATCH = 9,
  RF_ERR_QUOTA_EXCEEDED = 10,
  RF_ERR_NUMERIC = 11,
  RF_ERR_RANK_DEFICIENT = 12,
  RF_ERR_TOO_FEW_OBSERVATIONS = 13,
  RF_ERR_UNFITTED = 14,
  RF_ERR_SCHEMA_MISMATCH = 15,
  RF_ERR_NOT_FOUND = 16,
  RF_ERR_INTERNAL = 99
} rf_status;

typedef struct rf_dataset rf_dataset;
typedef struct rf_config rf_config;
typedef struct rf_model rf_model;
typedef struct rf_timing_model rf_timing_model;
typedef struct rf_results rf_results;

RF_API const char* rf_version(void);
RF_API const char* rf_status_name(rf_status status);
RF_API const char* rf_last_error(void);
RF_API void rf_string_free(char* s);

/* ---- datasets ---------------------------------------------------------- */

/* ".arff" files are parsed as ARFF, anything else as CSV with a header and
 * the class in the last column. */
RF_API rf_status rf_dataset_load(const char* path, rf_dataset** out);
RF_API rf_status rf_dataset_load_csv(const char* path, int has_header, int class_column,
                                     char delimiter, rf_dataset** out);
/* values is row-major n x m; labels in [0, num_classes). */
RF_API rf_status rf_dataset_from_arrays(const double* values, size_t n, size_t m,
                                        const int* labels, size_t num_classes,
                                        rf_dataset** out);
RF_API rf_status rf_dataset_make_oblique(size_t n, size_t m, size_t num_classes, double noise,
                                         uint64_t seed, rf_dataset** out);
RF_API rf_status rf_dataset_save_arff(const rf_dataset* data, const char* path);
RF_API void rf_dataset_free(rf_dataset* data);
RF_API size_t rf_dataset_num_cases(const rf_dataset* data);
RF_API size_t rf_dataset_num_attributes(const rf_dataset* data);
RF_API size_t rf_dataset_num_classes(const rf_dataset* data);
/* Borrowed pointer, valid while the handle lives. */
RF_API const char* rf_dataset_name(const rf_dataset* data);
RF_API rf_status rf_dataset_set_name(rf_dataset* data, const char* name);

/* Stratified split seeded by resample_id alone. Non-zero train_size and
 * test_size override train_fraction. */
RF_API rf_status rf_dataset_resample(const rf_dataset* data, uint64_t resample_id,
                                     double train_fraction, size_t train_size,
                                     size_t test_size, rf_dataset** train, rf_dataset** test);
RF_API rf_status rf_dataset_concat(const rf_dataset* first, const rf_dataset* second,
                                   rf_dataset** out);

/* ---- classifier configuration ----------------------------------------- */

/* Names: rotf, randf, rotf40, rotf100, majority, rt_bag, rt_bag_pca, rt_pca,
 * c45_bag, c45_bag_pca, c45_pca. */
RF_API rf_status rf_config_create(const char* classifier, uint64_t seed, rf_config** out);
RF_API rf_config* rf_config_clone(const rf_config* config);
RF_API void rf_config_free(rf_config* config);
/* Keys: trees, group_size, proportion, subspace, max_depth, min_cases,
 * max_attributes (0 clears), bag_fraction, prune (0/1), threads. */
RF_API rf_status rf_config_set(rf_config* config, const char* key, double value);
RF_API rf_status rf_config_set_seed(rf_config* config, uint64_t seed);
RF_API uint64_t rf_resample_seed(uint64_t seed, size_t resample);
RF_API rf_status rf_config_to_json(const rf_config* config, char** out);

/* ---- training and prediction ------------------------------------------ */

RF_API rf_status rf_train(const rf_config* config, const rf_dataset* train, rf_model** out);
RF_API void rf_model_free(rf_model* model);
RF_API size_t rf_model_num_trees(const rf_model* model);
RF_API size_t rf_model_num_classes(const rf_model* model);
RF_API double rf_model_build_seconds(const rf_model* model);
/* Zeroes recorded build times so saved files depend only on the inputs. */
RF_API void rf_model_clear_timings(rf_model* model);
/* out receives n x c probabilities, row-major. */
RF_API rf_status rf_model_predict_proba(const rf_model* model, const rf_dataset* data,
                                        double* out, size_t out_len);
RF_API rf_status rf_model_write_predictions(const rf_model* model, const rf_dataset* data,
                                            const char* path);
RF_API rf_status rf_model_save(const rf_model* model, const char* path);
RF_API rf_status rf_model_load(const char* path, rf_model** out);

typedef struct rf_metrics {
  double error;
  double balanced_error;
  double auc;
  double nll;
  double build_seconds;
  size_t n_test;
} rf_metrics;

/* AUC weights come from the class counts of `train` (NULL: test counts). */
RF_API rf_status rf_evaluate(const rf_model* model, const rf_dataset* train,
                             const rf_dataset* test, rf_metrics* out);
RF_API const char* rf_metrics_csv_header(void);
RF_API rf_status rf_metrics_csv_row(const char* dataset, const char* classifier,
                                    size_t resample, const rf_metrics* metrics, char** out);

/* ---- validation -------------------------------------------------------- */

RF_API rf_status rf_cross_validate(const rf_config* config, const rf_dataset* data,
                                   size_t folds, uint64_t seed, double* error);
/* grid: "preset" for the built-in ranges of the classifier, or
 * "trees=10,100;group_size=3,4". report_json holds the chosen cell and the
 * CV table; out_model (optional) receives the refit model. */
RF_API rf_status rf_tune(const rf_config* config, const rf_dataset* data, const char* grid,
                         size_t folds, uint64_t seed, char** report_json, rf_model** out_model);
/* csv_out: value,mean_diff,ci_low,ci_high,p_value */
RF_API rf_status rf_sweep(const rf_config* config, const rf_dataset* const* datasets,
                          size_t num_datasets, const char* param, const double* values,
                          size_t num_values, double baseline, size_t resamples,
                          double train_fraction, char** csv_out);

/* ---- build-time model and contract training ---------------------------- */

RF_API rf_status rf_timing_published(rf_timing_model** out);
/* unit: "seconds", "minutes" or "hours". */
RF_API rf_status rf_timing_fit_csv(const char* observations_csv, int include_nlogn,
                                   const char* unit, rf_timing_model** out);
RF_API rf_status rf_timing_load(const char* path, rf_timing_model** out);
RF_API rf_status rf_timing_save(const rf_timing_model* model, const char* path);
RF_API void rf_timing_free(rf_timing_model* model);
RF_API rf_status rf_timing_predict(const rf_timing_model* model, double n, double m,
                                   double* out);
RF_API rf_status rf_timing_interval(const rf_timing_model* model, double n, double m,
                                    double alpha, double* low, double* high);
RF_API const char* rf_timing_unit(const rf_timing_model* model);
RF_API rf_status rf_timing_set_scale(rf_timing_model* model, double scale);
/* Runs the reference workload and stores local / reference_seconds. */
RF_API rf_status rf_timing_calibrate(rf_timing_model* model, double reference_seconds,
                                     double* scale);

typedef struct rf_contract_options {
  double budget_seconds;
  int e_min;
  int e_max;
  double alpha;
  uint64_t memory_limit_bytes;
  double interval_alpha;
} rf_contract_options;

RF_API rf_contract_options rf_contract_defaults(void);
/* timing NULL: the published model. log_csv columns:
 * index,phase,subsample_size,cap,seconds,t_hat,elapsed (phase 0 marks a
 * delegated full build). */
RF_API rf_status rf_contract_train(const rf_config* config, const rf_dataset* train,
                                   const rf_timing_model* timing,
                                   const rf_contract_options* options, rf_model** out,
                                   char** log_csv, char** summary_json);

/* ---- comparison statistics --------------------------------------------- */

/* metric: error, balanced_error, auc, nll or build_seconds. */
RF_API rf_status rf_results_load(const char* const* paths, size_t num_paths,
                                 const char* metric, rf_results** out);
RF_API void rf_results_free(rf_results* results);
/* JSON with ranks, Friedman test, pairwise Wilcoxon p, Holm rejections and
 * cliques. */
RF_API rf_status rf_compare(const rf_results* results, double alpha, char** report_json);
/* Writes <stem>.json and <stem>.svg. */
RF_API rf_status rf_cd_diagram(const rf_results* results, double alpha, const char* stem);
RF_API rf_status rf_wilcoxon(const double* x, const double* y, size_t n, double* p_value);
RF_API rf_status rf_paired_t(const double* x, const double* y, size_t n, double* p_value);

#ifdef __cplusplus
}
#endif

#endif /* ROTFORGE_H */

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

#include "rotforge/rotforge.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "rotforge/contract.hpp"
#include "rotforge/dataset.hpp"
#include "rotforge/forest.hpp"
#include "rotforge/metrics.hpp"
#include "rotforge/stats.hpp"
#include "rotforge/synthetic.hpp"
#include "rotforge/timing.hpp"
#include "rotforge/validation.hpp"
#include "text_util.hpp"

struct rf_dataset {
  rotforge::Dataset data;
};

struct rf_config {
  rotforge::ClassifierSpec spec;
};

struct rf_model {
  rotforge::TrainedClassifier model;
  std::vector<std::string> class_names;
};

struct rf_timing_model {
  rotforge::TimingModel model;
};

struct rf_results {
  rotforge::ResultsMatrix matrix;
};

namespace {

using rotforge::Error;
using rotforge::ErrorCode;

thread_local std::string g_last_error;

rf_status Fail(rf_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn, mapping exceptions onto status codes.
template <typename Fn>
rf_status Guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return RF_OK;
  } catch (const Error& e) {
    return Fail(static_cast<rf_status>(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return Fail(RF_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return Fail(RF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(RF_ERR_INTERNAL, e.what());
  } catch (...) {
    return Fail(RF_ERR_INTERNAL, "unknown failure");
  }
}

void Require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

char* Duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rf_model* Wrap(rotforge::TrainedClassifier model, std::vector<std::string> class_names) {
  auto* out = new rf_model;
  out->model = std::move(model);
  out->class_names = std::move(class_names);
  return out;
}

rotforge::ParamGrid ParseGrid(const std::string& text, const rotforge::ClassifierSpec& spec,
                              std::size_t num_attributes) {
  if (text == "preset") {
    if (spec.forest.base == rotforge::BaseLearner::kRandomTree) {
      return rotforge::ParamGrid::RandomForestPreset(num_attributes);
    }
    return rotforge::ParamGrid::RotationForestPreset();
  }
  rotforge::ParamGrid grid;
  std::stringstream axes(text);
  std::string axis;
  while (std::getline(axes, axis, ';')) {
    axis = std::string(rotforge::internal::Trim(axis));
    if (axis.empty()) continue;
    const auto eq = axis.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kParse, "grid axis needs name=values");
    const auto param = rotforge::ParseParam(std::string(rotforge::internal::Trim(axis.substr(0, eq))));
    std::vector<double> values;
    std::stringstream list(axis.substr(eq + 1));
    std::string item;
    while (std::getline(list, item, ',')) {
      const auto v = rotforge::internal::ParseDouble(rotforge::internal::Trim(item));
      if (!v) throw Error(ErrorCode::kParse, "bad grid value '" + item + "'");
      values.push_back(*v);
    }
    if (values.empty()) throw Error(ErrorCode::kParse, "grid axis without values");
    grid.axes.emplace_back(param, values);
  }
  if (grid.axes.empty()) throw Error(ErrorCode::kParse, "empty grid");
  return grid;
}

}  // namespace

extern "C" {

const char* rf_version(void) { return "1.0.0"; }

const char* rf_status_name(rf_status status) {
  if (status == RF_OK) return "ok";
  return rotforge::ErrorCodeName(static_cast<ErrorCode>(status));
}

const char* rf_last_error(void) { return g_last_error.c_str(); }

void rf_string_free(char* s) { std::free(s); }

rf_status rf_dataset_load(const char* path, rf_dataset** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    auto d = std::make_unique<rf_dataset>();
    d->data = rotforge::LoadDataset(path);
    *out = d.release();
  });
}

rf_status rf_dataset_load_csv(const char* path, int has_header, int class_column, char delimiter,
                              rf_dataset** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    rotforge::CsvOptions options;
    options.has_header = has_header != 0;
    options.class_column = class_column;
    options.delimiter = delimiter;
    auto d = std::make_unique<rf_dataset>();
    d->data = rotforge::LoadCsv(path, options);
    *out = d.release();
  });
}

rf_status rf_dataset_from_arrays(const double* values, size_t n, size_t m, const int* labels,
                                 size_t num_classes, rf_dataset** out) {
  return Guard([&] {
    Require(values && labels && out, "null argument");
    auto d = std::make_unique<rf_dataset>();
    d->data.name = "arrays";
    d->data.values = rotforge::Matrix(n, m);
    std::copy(values, values + n * m, d->data.values.data().begin());
    d->data.labels.assign(labels, labels + n);
    for (size_t a = 0; a < m; ++a) d->data.feature_names.push_back("x" + std::to_string(a));
    for (size_t j = 0; j < num_classes; ++j) d->data.class_names.push_back(std::to_string(j));
    d->data.Validate(false);
    *out = d.release();
  });
}

rf_status rf_dataset_make_oblique(size_t n, size_t m, size_t num_classes, double noise,
                                  uint64_t seed, rf_dataset** out) {
  return Guard([&] {
    Require(out, "null argument");
    rotforge::ObliqueSpec spec;
    spec.cases = n;
    spec.attributes = m;
    spec.classes = num_classes;
    spec.noise = noise;
    spec.seed = seed;
    auto d = std::make_unique<rf_dataset>();
    d->data = rotforge::MakeObliqueDataset(spec);
    *out = d.release();
  });
}

rf_status rf_dataset_save_arff(const rf_dataset* data, const char* path) {
  return Guard([&] {
    Require(data && path, "null argument");
    rotforge::SaveArff(data->data, path);
  });
}

void rf_dataset_free(rf_dataset* data) { delete data; }
size_t rf_dataset_num_cases(const rf_dataset* d) { return d ? d->data.num_cases() : 0; }
size_t rf_dataset_num_attributes(const rf_dataset* d) { return d ? d->data.num_attributes() : 0; }
size_t rf_dataset_num_classes(const rf_dataset* d) { return d ? d->data.num_classes() : 0; }
const char* rf_dataset_name(const rf_dataset* d) { return d ? d->data.name.c_str() : ""; }

rf_status rf_dataset_set_name(rf_dataset* data, const char* name) {
  return Guard([&] {
    Require(data && name, "null argument");
    data->data.name = name;
  });
}

rf_status rf_dataset_resample(const rf_dataset* data, uint64_t resample_id, double train_fraction,
                              size_t train_size, size_t test_size, rf_dataset** train,
                              rf_dataset** test) {
  return Guard([&] {
    Require(data && train && test, "null argument");
    rotforge::ResamplePlan plan;
    plan.resample_id = resample_id;
    plan.train_fraction = train_fraction;
    if (train_size > 0) plan.train_size = train_size;
    if (test_size > 0) plan.test_size = test_size;
    auto split = rotforge::StratifiedResample(data->data, plan);
    auto tr = std::make_unique<rf_dataset>();
    auto te = std::make_unique<rf_dataset>();
    tr->data = std::move(split.train);
    te->data = std::move(split.test);
    *train = tr.release();
    *test = te.release();
  });
}

rf_status rf_dataset_concat(const rf_dataset* first, const rf_dataset* second, rf_dataset** out) {
  return Guard([&] {
    Require(first && second && out, "null argument");
    auto d = std::make_unique<rf_dataset>();
    d->data = rotforge::Concatenate(first->data, second->data);
    *out = d.release();
  });
}

rf_status rf_config_create(const char* classifier, uint64_t seed, rf_config** out) {
  return Guard([&] {
    Require(classifier && out, "null argument");
    auto c = std::make_unique<rf_config>();
    c->spec = rotforge::ClassifierSpec::FromName(classifier, seed);
    *out = c.release();
  });
}

rf_config* rf_config_clone(const rf_config* config) {
  if (!config) return nullptr;
  return new (std::nothrow) rf_config(*config);
}

void rf_config_free(rf_config* config) { delete config; }

rf_status rf_config_set(rf_config* config, const char* key, double value) {
  return Guard([&] {
    Require(config && key, "null argument");
    const std::string k = key;
    auto& f = config->spec.forest;
    auto as_int = [&](int lo) {
      if (value != static_cast<double>(static_cast<long long>(value)) || value < lo) {
        throw Error(ErrorCode::kInvalidArgument, k + " must be an integer >= " + std::to_string(lo));
      }
      return static_cast<int>(value);
    };
    if (k == "min_cases") {
      f.min_cases = as_int(1);
    } else if (k == "max_attributes") {
      const int v = as_int(0);
      f.max_attributes_per_tree = v == 0 ? std::nullopt : std::optional<int>(v);
    } else if (k == "bag_fraction") {
      Require(value > 0.0 && value <= 1.0, "bag_fraction must lie in (0, 1]");
      f.bag_fraction = value;
    } else if (k == "prune") {
      f.prune = value != 0.0;
    } else if (k == "threads") {
      f.num_threads = as_int(1);
    } else {
      rotforge::ApplyParam(config->spec, rotforge::ParseParam(k), value);
    }
  });
}

rf_status rf_config_set_seed(rf_config* config, uint64_t seed) {
  return Guard([&] {
    Require(config, "null argument");
    config->spec.forest.seed = seed;
  });
}

uint64_t rf_resample_seed(uint64_t seed, size_t resample) {
  return rotforge::ResampleSeed(seed, resample);
}

rf_status rf_config_to_json(const rf_config* config, char** out) {
  return Guard([&] {
    Require(config && out, "null argument");
    nlohmann::json j = {{"classifier", config->spec.name}};
    if (config->spec.family == rotforge::ClassifierFamily::kForest) {
      j["forest"] = config->spec.forest.ToJson();
    }
    *out = Duplicate(j.dump(2));
  });
}

rf_status rf_train(const rf_config* config, const rf_dataset* train, rf_model** out) {
  return Guard([&] {
    Require(config && train && out, "null argument");
    *out = Wrap(rotforge::Train(config->spec, train->data), train->data.class_names);
  });
}

void rf_model_free(rf_model* model) { delete model; }

size_t rf_model_num_trees(const rf_model* model) {
  return model && model->model.forest ? model->model.forest->members.size() : 0;
}

size_t rf_model_num_classes(const rf_model* model) { return model ? model->model.num_classes() : 0; }

double rf_model_build_seconds(const rf_model* model) { return model ? model->model.build_seconds : 0.0; }

void rf_model_clear_timings(rf_model* model) {
  if (!model) return;
  model->model.build_seconds = 0.0;
  if (model->model.forest) {
    model->model.forest->build_seconds = 0.0;
    std::fill(model->model.forest->per_tree_seconds.begin(),
              model->model.forest->per_tree_seconds.end(), 0.0);
  }
}

rf_status rf_model_predict_proba(const rf_model* model, const rf_dataset* data, double* out,
                                 size_t out_len) {
  return Guard([&] {
    Require(model && data && out, "null argument");
    const size_t c = model->model.num_classes();
    if (out_len < data->data.num_cases() * c) {
      throw Error(ErrorCode::kDimensionMismatch, "output buffer too small");
    }
    for (size_t i = 0; i < data->data.num_cases(); ++i) {
      const auto dist = model->model.Predict(data->data.values.row(i));
      std::copy(dist.begin(), dist.end(), out + i * c);
    }
  });
}

rf_status rf_model_write_predictions(const rf_model* model, const rf_dataset* data,
                                     const char* path) {
  return Guard([&] {
    Require(model && data && path, "null argument");
    const auto preds = rotforge::PredictAll(model->model, data->data);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, std::string("cannot write ") + path);
    out << rotforge::PredictionsCsv(preds, model->model.num_classes());
  });
}

rf_status rf_model_save(const rf_model* model, const char* path) {
  return Guard([&] {
    Require(model && path, "null argument");
    if (model->model.forest) {
      model->model.forest->Save(path);
      return;
    }
    nlohmann::json j = {{"format", "rotforge-prior"},
                        {"version", 1},
                        {"class_names", model->class_names},
                        {"prior", model->model.prior}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, std::string("cannot write ") + path);
    out << j.dump(2) << '\n';
  });
}

rf_status rf_model_load(const char* path, rf_model** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kNotFound, std::string("model not found: ") + path);
    nlohmann::json j;
    in >> j;
    rotforge::TrainedClassifier model;
    std::vector<std::string> names;
    if (j.value("format", std::string()) == "rotforge-prior") {
      model.prior = j.at("prior").get<std::vector<double>>();
      names = j.at("class_names").get<std::vector<std::string>>();
      if (model.prior.size() != names.size()) throw Error(ErrorCode::kParse, "malformed prior model");
    } else {
      model.forest = rotforge::ForestModel::FromJson(j);
      names = model.forest->class_names;
      model.build_seconds = model.forest->build_seconds;
    }
    *out = Wrap(std::move(model), std::move(names));
  });
}

rf_status rf_evaluate(const rf_model* model, const rf_dataset* train, const rf_dataset* test,
                      rf_metrics* out) {
  return Guard([&] {
    Require(model && test && out, "null argument");
    const auto preds = rotforge::PredictAll(model->model, test->data);
    const auto counts = train ? train->data.ClassCounts() : test->data.ClassCounts();
    const auto report = rotforge::Evaluate(preds, counts);
    out->error = report.error;
    out->balanced_error = report.balanced_error;
    out->auc = report.auc;
    out->nll = report.nll;
    out->n_test = report.n_test;
    out->build_seconds = model->model.build_seconds;
  });
}

const char* rf_metrics_csv_header(void) {
  static const std::string header = rotforge::MetricsCsvHeader();
  return header.c_str();
}

rf_status rf_metrics_csv_row(const char* dataset, const char* classifier, size_t resample,
                             const rf_metrics* metrics, char** out) {
  return Guard([&] {
    Require(dataset && classifier && metrics && out, "null argument");
    rotforge::MetricReport r;
    r.error = metrics->error;
    r.balanced_error = metrics->balanced_error;
    r.auc = metrics->auc;
    r.nll = metrics->nll;
    r.n_test = metrics->n_test;
    r.build_seconds = metrics->build_seconds;
    *out = Duplicate(rotforge::MetricsCsvRow(dataset, classifier, resample, r));
  });
}

rf_status rf_cross_validate(const rf_config* config, const rf_dataset* data, size_t folds,
                            uint64_t seed, double* error) {
  return Guard([&] {
    Require(config && data && error, "null argument");
    *error = rotforge::CrossValidate(config->spec, data->data, folds, seed).error;
  });
}

rf_status rf_tune(const rf_config* config, const rf_dataset* data, const char* grid, size_t folds,
                  uint64_t seed, char** report_json, rf_model** out_model) {
  return Guard([&] {
    Require(config && data && grid && report_json, "null argument");
    const auto parsed = ParseGrid(grid, config->spec, data->data.num_attributes());
    auto result = rotforge::GridTune(config->spec, parsed, data->data, folds, seed,
                                     out_model != nullptr);
    nlohmann::json j;
    j["classifier"] = config->spec.name;
    j["folds"] = folds;
    j["cv_error"] = result.cv_error;
    nlohmann::json best;
    for (size_t a = 0; a < parsed.axes.size(); ++a) {
      best[rotforge::ParamName(parsed.axes[a].first)] = result.best_values[a];
    }
    j["best"] = best;
    nlohmann::json cells = nlohmann::json::array();
    for (size_t cell = 0; cell < parsed.size(); ++cell) {
      const auto values = parsed.Cell(cell);
      nlohmann::json row;
      for (size_t a = 0; a < values.size(); ++a) row[rotforge::ParamName(parsed.axes[a].first)] = values[a];
      row["cv_error"] = result.cell_errors[cell];
      cells.push_back(row);
    }
    j["cells"] = cells;
    *report_json = Duplicate(j.dump(2));
    if (out_model) *out_model = Wrap(std::move(*result.model), data->data.class_names);
  });
}

rf_status rf_sweep(const rf_config* config, const rf_dataset* const* datasets, size_t num_datasets,
                   const char* param, const double* values, size_t num_values, double baseline,
                   size_t resamples, double train_fraction, char** csv_out) {
  return Guard([&] {
    Require(config && datasets && param && values && csv_out, "null argument");
    std::vector<rotforge::Dataset> sets;
    for (size_t d = 0; d < num_datasets; ++d) {
      Require(datasets[d] != nullptr, "null dataset");
      sets.push_back(datasets[d]->data);
    }
    const auto result = rotforge::SensitivitySweep(
        sets, config->spec, rotforge::ParseParam(param),
        std::vector<double>(values, values + num_values), baseline, resamples, train_fraction);
    using rotforge::internal::FormatDouble;
    std::ostringstream os;
    os << "value,mean_diff,ci_low,ci_high,p_value\n";
    for (const auto& p : result.points) {
      os << FormatDouble(p.value) << ',' << FormatDouble(p.mean_diff) << ','
         << FormatDouble(p.ci_low) << ',' << FormatDouble(p.ci_high) << ','
         << FormatDouble(p.p_value) << '\n';
    }
    *csv_out = Duplicate(os.str());
  });
}

rf_status rf_timing_published(rf_timing_model** out) {
  return Guard([&] {
    Require(out, "null argument");
    *out = new rf_timing_model{rotforge::TimingModel::Published()};
  });
}

rf_status rf_timing_fit_csv(const char* observations_csv, int include_nlogn, const char* unit,
                            rf_timing_model** out) {
  return Guard([&] {
    Require(observations_csv && out, "null argument");
    const auto obs = rotforge::LoadTimingObservations(observations_csv);
    auto tu = rotforge::ParseTimeUnit(unit ? unit : "seconds");
    // Observations are recorded in seconds; the fit reports in `unit`.
    *out = new rf_timing_model{rotforge::FitTimingModel(obs, include_nlogn != 0, tu)};
  });
}

rf_status rf_timing_load(const char* path, rf_timing_model** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    *out = new rf_timing_model{rotforge::TimingModel::Load(path)};
  });
}

rf_status rf_timing_save(const rf_timing_model* model, const char* path) {
  return Guard([&] {
    Require(model && path, "null argument");
    model->model.Save(path);
  });
}

void rf_timing_free(rf_timing_model* model) { delete model; }

rf_status rf_timing_predict(const rf_timing_model* model, double n, double m, double* out) {
  return Guard([&] {
    Require(model && out, "null argument");
    Require(n >= 1 && m >= 1, "n and m must be at least 1");
    *out = model->model.Predict(n, m);
  });
}

rf_status rf_timing_interval(const rf_timing_model* model, double n, double m, double alpha,
                             double* low, double* high) {
  return Guard([&] {
    Require(model && low && high, "null argument");
    const auto iv = model->model.PredictionInterval(n, m, alpha);
    *low = iv.low;
    *high = iv.high;
  });
}

const char* rf_timing_unit(const rf_timing_model* model) {
  return model ? rotforge::TimeUnitName(model->model.unit) : "";
}

rf_status rf_timing_set_scale(rf_timing_model* model, double scale) {
  return Guard([&] {
    Require(model, "null argument");
    Require(scale > 0.0, "calibration scale must be positive");
    model->model.calibration_scale = scale;
  });
}

rf_status rf_timing_calibrate(rf_timing_model* model, double reference_seconds, double* scale) {
  return Guard([&] {
    Require(model, "null argument");
    const double s = rotforge::Calibrate(rotforge::RunReferenceWorkload, reference_seconds);
    model->model.calibration_scale = s;
    if (scale) *scale = s;
  });
}

rf_contract_options rf_contract_defaults(void) {
  const rotforge::ContractConfig c;
  return rf_contract_options{c.budget_seconds, c.e_min, c.e_max, c.alpha, c.memory_limit_bytes,
                             c.interval_alpha};
}

rf_status rf_contract_train(const rf_config* config, const rf_dataset* train,
                            const rf_timing_model* timing, const rf_contract_options* options,
                            rf_model** out, char** log_csv, char** summary_json) {
  return Guard([&] {
    Require(config && train && options && out, "null argument");
    Require(config->spec.family == rotforge::ClassifierFamily::kForest,
            "contract training needs a forest classifier");
    rotforge::ContractConfig cc;
    cc.budget_seconds = options->budget_seconds;
    cc.e_min = options->e_min;
    cc.e_max = options->e_max;
    cc.alpha = options->alpha;
    cc.memory_limit_bytes = options->memory_limit_bytes;
    cc.interval_alpha = options->interval_alpha;
    cc.timing = timing ? timing->model : rotforge::TimingModel::Published();
    auto result = rotforge::ContractTrain(train->data, cc, config->spec.forest);

    using rotforge::internal::FormatDouble;
    if (log_csv) {
      std::ostringstream os;
      os << "index,phase,subsample_size,cap,seconds,t_hat,elapsed\n";
      if (result.delegated()) {
        double elapsed = 0.0;
        const auto& per_tree = result.model.per_tree_seconds;
        for (size_t i = 0; i < per_tree.size(); ++i) {
          elapsed += per_tree[i];
          os << i << ",0," << train->data.num_attributes() << ',' << train->data.num_attributes()
             << ',' << FormatDouble(per_tree[i]) << ',' << FormatDouble(result.initial_t_hat)
             << ',' << FormatDouble(elapsed) << '\n';
        }
      } else {
        for (const auto& e : result.log) {
          os << e.index << ',' << e.phase << ',' << e.subsample << ',' << e.cap << ','
             << FormatDouble(e.seconds) << ',' << FormatDouble(e.t_hat) << ','
             << FormatDouble(e.elapsed) << '\n';
        }
      }
      *log_csv = Duplicate(os.str());
    }
    if (summary_json) {
      nlohmann::json j = {{"budget_seconds", cc.budget_seconds},
                          {"delegated", result.delegated()},
                          {"axis", rotforge::ReductionAxisName(result.axis)},
                          {"stop", rotforge::ContractStopName(result.stop)},
                          {"initial_t_hat", result.initial_t_hat},
                          {"trees", result.model.members.size()},
                          {"build_seconds", result.model.build_seconds}};
      *summary_json = Duplicate(j.dump(2));
    }
    rotforge::TrainedClassifier trained;
    trained.build_seconds = result.model.build_seconds;
    trained.forest = std::move(result.model);
    *out = Wrap(std::move(trained), train->data.class_names);
  });
}

rf_status rf_results_load(const char* const* paths, size_t num_paths, const char* metric,
                          rf_results** out) {
  return Guard([&] {
    Require(paths && metric && out, "null argument");
    std::vector<std::filesystem::path> files;
    for (size_t i = 0; i < num_paths; ++i) {
      Require(paths[i] != nullptr, "null path");
      files.emplace_back(paths[i]);
    }
    *out = new rf_results{rotforge::LoadResults(files, rotforge::ParseMetric(metric))};
  });
}

void rf_results_free(rf_results* results) { delete results; }

rf_status rf_compare(const rf_results* results, double alpha, char** report_json) {
  return Guard([&] {
    Require(results && report_json, "null argument");
    const auto report = rotforge::HolmCliques(results->matrix, alpha);
    auto j = report.ToJson();
    j["datasets"] = results->matrix.datasets;
    j["lower_is_better"] = results->matrix.lower_is_better;
    *report_json = Duplicate(j.dump(2));
  });
}

rf_status rf_cd_diagram(const rf_results* results, double alpha, const char* stem) {
  return Guard([&] {
    Require(results && stem, "null argument");
    rotforge::WriteCdDiagram(rotforge::HolmCliques(results->matrix, alpha), stem);
  });
}

rf_status rf_wilcoxon(const double* x, const double* y, size_t n, double* p_value) {
  return Guard([&] {
    Require(x && y && p_value, "null argument");
    *p_value = rotforge::WilcoxonSignedRank({x, x + n}, {y, y + n}).p_value;
  });
}

rf_status rf_paired_t(const double* x, const double* y, size_t n, double* p_value) {
  return Guard([&] {
    Require(x && y && p_value, "null argument");
    *p_value = rotforge::PairedT({x, x + n}, {y, y + n}).p_value;
  });
}

}  // extern "C"

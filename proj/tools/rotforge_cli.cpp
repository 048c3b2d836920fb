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

// rotforge command-line tool. Talks to the library only through the C API.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rotforge/rotforge.h"

namespace fs = std::filesystem;

namespace {

// Thrown when a library call fails; carries the status for the exit code.
struct ApiFailure : std::runtime_error {
  rf_status status;
  ApiFailure(rf_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

void Check(rf_status status) {
  if (status != RF_OK) throw ApiFailure(status, rf_last_error());
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Dataset = std::unique_ptr<rf_dataset, Deleter<rf_dataset, rf_dataset_free>>;
using Config = std::unique_ptr<rf_config, Deleter<rf_config, rf_config_free>>;
using Model = std::unique_ptr<rf_model, Deleter<rf_model, rf_model_free>>;
using Timing = std::unique_ptr<rf_timing_model, Deleter<rf_timing_model, rf_timing_free>>;
using Results = std::unique_ptr<rf_results, Deleter<rf_results, rf_results_free>>;

std::string TakeString(char* s) {
  std::string out = s ? s : "";
  rf_string_free(s);
  return out;
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ApiFailure(RF_ERR_IO, "cannot write " + path.string());
  out << text;
}

std::string Format(double v, const char* fmt = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::uint64_t DefaultSeed() {
  if (const char* env = std::getenv("ROTFORGE_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring non-numeric ROTFORGE_SEED\n";
    }
  }
  return 0;
}

struct Common {
  std::uint64_t seed = DefaultSeed();
  std::string out = "results";
  std::size_t resamples = 30;
  double train_fraction = 0.5;
  int threads = 1;
  bool no_timestamps = false;
};

struct ForestFlags {
  std::optional<int> trees, group_size, subspace, max_depth, max_attributes, min_cases;
  std::optional<double> proportion;
  bool prune = false;
};

void AddCommon(CLI::App* app, Common& c, bool with_resamples = true) {
  app->add_option("--seed", c.seed, "Base seed (default: ROTFORGE_SEED or 0)");
  app->add_option("--out", c.out, "Output directory");
  if (with_resamples) {
    app->add_option("--resamples", c.resamples, "Stratified resamples")->check(CLI::PositiveNumber);
    app->add_option("--train-fraction", c.train_fraction, "Training share of each resample")
        ->check(CLI::Range(0.0, 1.0));
  }
  app->add_option("--threads", c.threads, "Tree-building threads")->check(CLI::PositiveNumber);
  app->add_flag("--no-timestamps", c.no_timestamps, "Zero recorded build times in outputs");
}

void AddForestFlags(CLI::App* app, ForestFlags& f) {
  app->add_option("--trees", f.trees, "Ensemble size");
  app->add_option("--group-size", f.group_size, "Attributes per rotation group");
  app->add_option("--proportion", f.proportion, "Share of cases sampled per group");
  app->add_option("--subspace", f.subspace, "Attributes evaluated per random-tree node");
  app->add_option("--max-depth", f.max_depth, "Depth cap (0: none)");
  app->add_option("--max-attributes", f.max_attributes, "Random attributes per tree");
  app->add_option("--min-cases", f.min_cases, "Minimum cases per leaf");
  app->add_flag("--prune", f.prune, "Pessimistic pruning");
}

Config MakeConfig(const std::string& classifier, const Common& c, const ForestFlags& f) {
  rf_config* raw = nullptr;
  Check(rf_config_create(classifier.c_str(), c.seed, &raw));
  Config config(raw);
  if (classifier == "majority") return config;
  auto set = [&](const char* key, auto value) {
    if (value) Check(rf_config_set(config.get(), key, static_cast<double>(*value)));
  };
  set("trees", f.trees);
  set("group_size", f.group_size);
  set("proportion", f.proportion);
  set("subspace", f.subspace);
  set("max_depth", f.max_depth);
  set("max_attributes", f.max_attributes);
  set("min_cases", f.min_cases);
  if (f.prune) Check(rf_config_set(config.get(), "prune", 1.0));
  Check(rf_config_set(config.get(), "threads", c.threads));
  return config;
}

Dataset LoadData(const std::string& path) {
  rf_dataset* raw = nullptr;
  Check(rf_dataset_load(path.c_str(), &raw));
  Dataset d(raw);
  Check(rf_dataset_set_name(d.get(), fs::path(path).stem().string().c_str()));
  return d;
}

std::pair<Dataset, Dataset> Resample(const rf_dataset* data, std::size_t r, double fraction) {
  rf_dataset* train = nullptr;
  rf_dataset* test = nullptr;
  Check(rf_dataset_resample(data, r, fraction, 0, 0, &train, &test));
  return {Dataset(train), Dataset(test)};
}

fs::path ResampleDir(const Common& c, const std::string& classifier, const std::string& dataset,
                     std::size_t r) {
  fs::path dir = fs::path(c.out) / classifier / dataset / ("resample" + std::to_string(r));
  fs::create_directories(dir);
  return dir;
}

// Writes model.json, predictions.csv and metrics.csv; returns the metrics row.
std::string Persist(rf_model* model, const rf_dataset* train, const rf_dataset* test,
                    const fs::path& dir, const std::string& classifier,
                    const std::string& dataset, std::size_t r, const Common& c) {
  if (c.no_timestamps) rf_model_clear_timings(model);
  Check(rf_model_save(model, (dir / "model.json").string().c_str()));
  Check(rf_model_write_predictions(model, test, (dir / "predictions.csv").string().c_str()));
  rf_metrics m{};
  Check(rf_evaluate(model, train, test, &m));
  if (c.no_timestamps) m.build_seconds = 0.0;
  char* row = nullptr;
  Check(rf_metrics_csv_row(dataset.c_str(), classifier.c_str(), r, &m, &row));
  const std::string line = TakeString(row);
  WriteFile(dir / "metrics.csv", std::string(rf_metrics_csv_header()) + "\n" + line + "\n");
  return line;
}

// Trains every classifier on every dataset and resample; returns metric rows.
std::vector<std::string> RunGrid(const std::vector<std::string>& data_paths,
                                 const std::vector<std::string>& classifiers, const Common& c,
                                 const ForestFlags& flags) {
  std::vector<std::string> rows;
  for (const auto& path : data_paths) {
    const Dataset data = LoadData(path);
    const std::string name = rf_dataset_name(data.get());
    for (std::size_t r = 0; r < c.resamples; ++r) {
      auto [train, test] = Resample(data.get(), r, c.train_fraction);
      for (const auto& classifier : classifiers) {
        Config config = MakeConfig(classifier, c, flags);
        Check(rf_config_set_seed(config.get(), rf_resample_seed(c.seed, r)));
        rf_model* raw = nullptr;
        Check(rf_train(config.get(), train.get(), &raw));
        Model model(raw);
        rows.push_back(Persist(model.get(), train.get(), test.get(),
                               ResampleDir(c, classifier, name, r), classifier, name, r, c));
        std::cerr << classifier << " " << name << " resample " << r << " done\n";
      }
    }
  }
  return rows;
}

void WriteResults(const Common& c, const std::vector<std::string>& rows) {
  fs::create_directories(c.out);
  std::string text = std::string(rf_metrics_csv_header()) + "\n";
  for (const auto& row : rows) text += row + "\n";
  WriteFile(fs::path(c.out) / "results.csv", text);
}

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ApiFailure(RF_ERR_INVALID_ARGUMENT, "bad number '" + item + "'");
    }
  }
  return out;
}

std::vector<const char*> CStrings(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

// Per-dataset rank of each classifier's mean error, averaged over datasets.
void PrintAblation(const std::vector<std::string>& classifiers, const Common& c) {
  std::vector<std::string> paths = {(fs::path(c.out) / "results.csv").string()};
  auto cpaths = CStrings(paths);
  rf_results* raw = nullptr;
  Check(rf_results_load(cpaths.data(), cpaths.size(), "error", &raw));
  Results results(raw);
  char* json = nullptr;
  Check(rf_compare(results.get(), 0.05, &json));
  const std::string report = TakeString(json);
  WriteFile(fs::path(c.out) / "ablation_stats.json", report);

  // Mean accuracy per classifier straight from the rows.
  std::ifstream in(paths.front());
  std::string line;
  std::getline(in, line);
  std::map<std::string, std::pair<double, std::size_t>> acc;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string dataset, classifier, resample, error;
    std::getline(ss, dataset, ',');
    std::getline(ss, classifier, ',');
    std::getline(ss, resample, ',');
    std::getline(ss, error, ',');
    acc[classifier].first += 1.0 - std::stod(error);
    ++acc[classifier].second;
  }
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < classifiers.size(); ++i) {
    const auto& a = acc[classifiers[i]];
    order.emplace_back(a.first / static_cast<double>(std::max<std::size_t>(a.second, 1)), i);
  }
  std::vector<std::size_t> rank(classifiers.size());
  auto sorted = order;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t pos = 0; pos < sorted.size(); ++pos) rank[sorted[pos].second] = pos + 1;
  std::string table = "combo,classifier,mean_accuracy,rank\n";
  for (std::size_t i = 0; i < classifiers.size(); ++i) {
    table += std::to_string(i + 1) + "," + classifiers[i] + "," + Format(order[i].first) + "," +
             std::to_string(rank[i]) + "\n";
  }
  WriteFile(fs::path(c.out) / "ablation.csv", table);
  std::cout << table;
}

int Run(int argc, char** argv) {
  CLI::App app{"rotforge: rotation forest toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option defaults");

  Common common;
  ForestFlags flags;

  // train
  std::string train_data, train_classifier = "rotf";
  auto* train = app.add_subcommand("train", "Train one classifier on every resample of a dataset");
  train->add_option("--data", train_data, "ARFF or CSV dataset")->required();
  train->add_option("--classifier", train_classifier, "Classifier name");
  AddCommon(train, common);
  AddForestFlags(train, flags);

  // predict
  std::string predict_model, predict_data, predict_out = "predictions.csv";
  auto* predict = app.add_subcommand("predict", "Score a dataset with a saved model");
  predict->add_option("--model", predict_model, "model.json")->required();
  predict->add_option("--data", predict_data, "ARFF or CSV dataset")->required();
  predict->add_option("--out", predict_out, "Predictions CSV");

  // contract
  std::string contract_data, contract_timing;
  rf_contract_options contract_opts = rf_contract_defaults();
  auto* contract = app.add_subcommand("contract", "Train rotation forest under a time budget");
  contract->add_option("--data", contract_data, "ARFF or CSV dataset")->required();
  contract->add_option("--budget", contract_opts.budget_seconds, "Budget in seconds")->required();
  contract->add_option("--timing", contract_timing, "Fitted timing model JSON (default: published)");
  contract->add_option("--e-min", contract_opts.e_min, "Minimum ensemble size");
  contract->add_option("--e-max", contract_opts.e_max, "Maximum ensemble size");
  contract->add_option("--alpha", contract_opts.alpha, "EWMA learning rate");
  contract->add_option("--memory-limit", contract_opts.memory_limit_bytes, "Bytes");
  contract->add_option("--interval-alpha", contract_opts.interval_alpha,
                       "Prediction interval level is 1 - this");
  AddCommon(contract, common);
  AddForestFlags(contract, flags);

  // benchmark
  std::vector<std::string> bench_data, bench_classifiers = {"rotf", "randf"};
  auto* benchmark = app.add_subcommand("benchmark", "Classifiers x datasets x resamples");
  benchmark->add_option("--data", bench_data, "Datasets")->required();
  benchmark->add_option("--classifier", bench_classifiers, "Classifier names");
  AddCommon(benchmark, common);
  AddForestFlags(benchmark, flags);

  // ablation
  std::vector<std::string> ablation_data;
  auto* ablation = app.add_subcommand("ablation", "The six base-learner x transform hybrids");
  ablation->add_option("--data", ablation_data, "Datasets")->required();
  AddCommon(ablation, common);
  AddForestFlags(ablation, flags);

  // sweep
  std::vector<std::string> sweep_data;
  std::string sweep_classifier = "rotf", sweep_param = "trees", sweep_values = "10,50,100,200,500";
  double sweep_baseline = 200;
  std::string sweep_out = "sweep.csv";
  auto* sweep = app.add_subcommand("sweep", "Error difference to a baseline parameter value");
  sweep->add_option("--data", sweep_data, "Datasets")->required();
  sweep->add_option("--classifier", sweep_classifier, "Classifier name");
  sweep->add_option("--param", sweep_param, "trees, group_size, proportion, subspace, max_depth");
  sweep->add_option("--values", sweep_values, "Comma-separated values");
  sweep->add_option("--baseline", sweep_baseline, "Reference value");
  sweep->add_option("--csv", sweep_out, "Output CSV");
  AddCommon(sweep, common);
  AddForestFlags(sweep, flags);

  // tune
  std::string tune_data, tune_classifier = "rotf", tune_grid = "preset";
  std::size_t tune_folds = 10;
  auto* tune = app.add_subcommand("tune", "Grid search by ten-fold CV on each training split");
  tune->add_option("--data", tune_data, "ARFF or CSV dataset")->required();
  tune->add_option("--classifier", tune_classifier, "Classifier name");
  tune->add_option("--grid", tune_grid, "'preset' or 'trees=10,100;group_size=3,4'");
  tune->add_option("--folds", tune_folds, "CV folds");
  AddCommon(tune, common);
  AddForestFlags(tune, flags);

  // compare / cd-diagram
  std::vector<std::string> compare_results;
  std::string compare_metric = "error";
  double compare_alpha = 0.05;
  auto* compare = app.add_subcommand("compare", "Friedman, Holm-corrected Wilcoxon, cliques");
  compare->add_option("--results", compare_results, "Result CSVs")->required();
  compare->add_option("--metric", compare_metric, "error, balanced_error, auc, nll, build_seconds");
  compare->add_option("--alpha", compare_alpha, "Family-wise level");
  compare->add_option("--out", common.out, "Output directory");

  std::string cd_stem = "cd";
  auto* cd = app.add_subcommand("cd-diagram", "Critical difference diagram (JSON + SVG)");
  cd->add_option("--results", compare_results, "Result CSVs")->required();
  cd->add_option("--metric", compare_metric, "Metric");
  cd->add_option("--alpha", compare_alpha, "Family-wise level");
  cd->add_option("--out", cd_stem, "Output path stem");

  // timing
  auto* timing = app.add_subcommand("timing", "Build-time model");
  timing->require_subcommand(1);
  std::string timing_obs, timing_unit = "seconds", timing_model, timing_out = "timing.json";
  bool timing_nlogn = false;
  double timing_n = 0, timing_m = 0, timing_alpha = 0.05, timing_reference = 0;
  auto* tfit = timing->add_subcommand("fit", "Fit from observations CSV (dataset,n,m,seconds)");
  tfit->add_option("--observations", timing_obs, "CSV file")->required();
  tfit->add_option("--unit", timing_unit, "Unit of the fitted model");
  tfit->add_flag("--nlogn", timing_nlogn, "Add the m*n*ln(n) regressor");
  tfit->add_option("--out", timing_out, "Model JSON");
  auto* tpredict = timing->add_subcommand("predict", "Predicted build time with interval");
  tpredict->add_option("--model", timing_model, "Model JSON (default: published coefficients)");
  tpredict->add_option("--n", timing_n, "Cases")->required();
  tpredict->add_option("--m", timing_m, "Attributes")->required();
  tpredict->add_option("--alpha", timing_alpha, "Interval level is 1 - alpha");
  auto* tcal = timing->add_subcommand("calibrate", "Scale a model by the reference workload");
  tcal->add_option("--model", timing_model, "Model JSON (default: published coefficients)");
  tcal->add_option("--reference-seconds", timing_reference, "Reference machine time")->required();
  tcal->add_option("--out", timing_out, "Calibrated model JSON");

  CLI11_PARSE(app, argc, argv);

  auto load_timing = [&]() {
    rf_timing_model* raw = nullptr;
    if (timing_model.empty()) Check(rf_timing_published(&raw));
    else Check(rf_timing_load(timing_model.c_str(), &raw));
    return Timing(raw);
  };

  if (*train) {
    WriteResults(common, RunGrid({train_data}, {train_classifier}, common, flags));
  } else if (*benchmark) {
    WriteResults(common, RunGrid(bench_data, bench_classifiers, common, flags));
  } else if (*ablation) {
    const std::vector<std::string> combos = {"rt_bag",  "rt_bag_pca",  "rt_pca",
                                             "c45_bag", "c45_bag_pca", "c45_pca"};
    WriteResults(common, RunGrid(ablation_data, combos, common, flags));
    PrintAblation(combos, common);
  } else if (*predict) {
    rf_model* raw_model = nullptr;
    Check(rf_model_load(predict_model.c_str(), &raw_model));
    Model model(raw_model);
    const Dataset data = LoadData(predict_data);
    Check(rf_model_write_predictions(model.get(), data.get(), predict_out.c_str()));
    rf_metrics m{};
    Check(rf_evaluate(model.get(), nullptr, data.get(), &m));
    std::cout << "error " << Format(m.error) << "\nbalanced_error " << Format(m.balanced_error)
              << "\nauc " << Format(m.auc) << "\nnll " << Format(m.nll) << "\n";
  } else if (*contract) {
    const Dataset data = LoadData(contract_data);
    const std::string name = rf_dataset_name(data.get());
    Timing tm = contract_timing.empty() ? Timing() : [&] {
      rf_timing_model* raw = nullptr;
      Check(rf_timing_load(contract_timing.c_str(), &raw));
      return Timing(raw);
    }();
    std::vector<std::string> rows;
    for (std::size_t r = 0; r < common.resamples; ++r) {
      auto [tr, te] = Resample(data.get(), r, common.train_fraction);
      Config config = MakeConfig("rotf", common, flags);
      Check(rf_config_set_seed(config.get(), rf_resample_seed(common.seed, r)));
      rf_model* raw = nullptr;
      char* log = nullptr;
      char* summary = nullptr;
      Check(rf_contract_train(config.get(), tr.get(), tm.get(), &contract_opts, &raw, &log,
                              &summary));
      Model model(raw);
      const fs::path dir = ResampleDir(common, "contract", name, r);
      WriteFile(dir / "contract_log.csv", TakeString(log));
      WriteFile(dir / "contract.json", TakeString(summary) + "\n");
      rows.push_back(Persist(model.get(), tr.get(), te.get(), dir, "contract", name, r, common));
      std::cerr << "contract " << name << " resample " << r << ": " << rf_model_num_trees(model.get())
                << " trees\n";
    }
    WriteResults(common, rows);
  } else if (*sweep) {
    std::vector<Dataset> owned;
    std::vector<const rf_dataset*> sets;
    for (const auto& p : sweep_data) {
      owned.push_back(LoadData(p));
      sets.push_back(owned.back().get());
    }
    Config config = MakeConfig(sweep_classifier, common, flags);
    const auto values = ParseList(sweep_values);
    char* csv = nullptr;
    Check(rf_sweep(config.get(), sets.data(), sets.size(), sweep_param.c_str(), values.data(),
                   values.size(), sweep_baseline, common.resamples, common.train_fraction, &csv));
    const std::string text = TakeString(csv);
    WriteFile(sweep_out, text);
    std::cout << text;
  } else if (*tune) {
    const Dataset data = LoadData(tune_data);
    const std::string name = rf_dataset_name(data.get());
    std::vector<std::string> rows;
    for (std::size_t r = 0; r < common.resamples; ++r) {
      auto [tr, te] = Resample(data.get(), r, common.train_fraction);
      Config config = MakeConfig(tune_classifier, common, flags);
      const std::uint64_t seed = rf_resample_seed(common.seed, r);
      Check(rf_config_set_seed(config.get(), seed));
      char* report = nullptr;
      rf_model* raw = nullptr;
      Check(rf_tune(config.get(), tr.get(), tune_grid.c_str(), tune_folds, seed, &report, &raw));
      Model model(raw);
      const std::string label = tune_classifier + "_tuned";
      const fs::path dir = ResampleDir(common, label, name, r);
      WriteFile(dir / "tune.json", TakeString(report) + "\n");
      rows.push_back(Persist(model.get(), tr.get(), te.get(), dir, label, name, r, common));
    }
    WriteResults(common, rows);
  } else if (*compare || *cd) {
    auto paths = CStrings(compare_results);
    rf_results* raw = nullptr;
    Check(rf_results_load(paths.data(), paths.size(), compare_metric.c_str(), &raw));
    Results results(raw);
    if (*cd) {
      Check(rf_cd_diagram(results.get(), compare_alpha, cd_stem.c_str()));
    } else {
      char* json = nullptr;
      Check(rf_compare(results.get(), compare_alpha, &json));
      const std::string report = TakeString(json);
      fs::create_directories(common.out);
      WriteFile(fs::path(common.out) / "compare.json", report + "\n");
      Check(rf_cd_diagram(results.get(), compare_alpha, (fs::path(common.out) / "cd").string().c_str()));
      std::cout << report << "\n";
    }
  } else if (*tfit) {
    rf_timing_model* raw = nullptr;
    Check(rf_timing_fit_csv(timing_obs.c_str(), timing_nlogn, timing_unit.c_str(), &raw));
    Timing tm(raw);
    Check(rf_timing_save(tm.get(), timing_out.c_str()));
    std::cout << "saved " << timing_out << "\n";
  } else if (*tpredict) {
    Timing tm = load_timing();
    double y = 0;
    Check(rf_timing_predict(tm.get(), timing_n, timing_m, &y));
    std::cout << "prediction " << Format(y) << " " << rf_timing_unit(tm.get()) << "\n";
    double lo = 0, hi = 0;
    if (rf_timing_interval(tm.get(), timing_n, timing_m, timing_alpha, &lo, &hi) == RF_OK) {
      std::cout << "interval " << Format(lo) << " " << Format(hi) << "\n";
    } else {
      std::cout << "interval unavailable (" << rf_last_error() << ")\n";
    }
  } else if (*tcal) {
    Timing tm = load_timing();
    double scale = 0;
    Check(rf_timing_calibrate(tm.get(), timing_reference, &scale));
    Check(rf_timing_save(tm.get(), timing_out.c_str()));
    std::cout << "calibration_scale " << Format(scale) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const ApiFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

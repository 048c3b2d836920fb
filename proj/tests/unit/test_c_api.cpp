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

// Exercises the shared library through its C header only.

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "rotforge/rotforge.h"
#include "test_util.hpp"

namespace {

std::string Take(char* s) {
  std::string out = s ? s : "";
  rf_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("status reporting") {
  CHECK(std::string(rf_version()).size() > 0);
  rf_dataset* d = nullptr;
  CHECK(rf_dataset_load("/nonexistent/none.arff", &d) == RF_ERR_NOT_FOUND);
  CHECK(d == nullptr);
  CHECK(std::string(rf_last_error()).find("dataset not found") != std::string::npos);
  CHECK(std::string(rf_status_name(RF_ERR_PARSE)).size() > 0);
  CHECK(rf_dataset_load(nullptr, &d) == RF_ERR_INVALID_ARGUMENT);
}

TEST_CASE("train, predict, save and reload") {
  testutil::TempDir dir("capi");
  rf_dataset* data = nullptr;
  REQUIRE(rf_dataset_make_oblique(200, 6, 3, 0.3, 5, &data) == RF_OK);
  CHECK(rf_dataset_num_classes(data) == 3);
  rf_dataset* train = nullptr;
  rf_dataset* test = nullptr;
  REQUIRE(rf_dataset_resample(data, 1, 0.5, 0, 0, &train, &test) == RF_OK);
  CHECK(rf_dataset_num_cases(train) == 100);

  rf_config* cfg = nullptr;
  REQUIRE(rf_config_create("rotf", 3, &cfg) == RF_OK);
  CHECK(rf_config_set(cfg, "trees", 15) == RF_OK);
  CHECK(rf_config_set(cfg, "no_such_key", 1) == RF_ERR_INVALID_ARGUMENT);
  rf_config* bad = nullptr;
  CHECK(rf_config_create("svm", 0, &bad) == RF_ERR_INVALID_ARGUMENT);

  rf_model* model = nullptr;
  REQUIRE(rf_train(cfg, train, &model) == RF_OK);
  CHECK(rf_model_num_trees(model) == 15);
  const std::size_t n = rf_dataset_num_cases(test);
  std::vector<double> p(n * 3), q(n * 3);
  REQUIRE(rf_model_predict_proba(model, test, p.data(), p.size()) == RF_OK);
  CHECK(rf_model_predict_proba(model, test, p.data(), 2) == RF_ERR_DIMENSION_MISMATCH);

  const std::string path = (dir / "m.json").string();
  REQUIRE(rf_model_save(model, path.c_str()) == RF_OK);
  rf_model* back = nullptr;
  REQUIRE(rf_model_load(path.c_str(), &back) == RF_OK);
  REQUIRE(rf_model_predict_proba(back, test, q.data(), q.size()) == RF_OK);
  CHECK(std::memcmp(p.data(), q.data(), p.size() * sizeof(double)) == 0);

  rf_metrics m{};
  REQUIRE(rf_evaluate(model, train, test, &m) == RF_OK);
  CHECK(m.n_test == n);
  CHECK(m.error >= 0.0);
  CHECK(m.error < 0.5);
  CHECK(m.auc > 0.5);
  char* row = nullptr;
  REQUIRE(rf_metrics_csv_row("d", "rotf", 1, &m, &row) == RF_OK);
  CHECK(Take(row).rfind("d,rotf,1,", 0) == 0);

  const std::string csv = (dir / "p.csv").string();
  REQUIRE(rf_model_write_predictions(model, test, csv.c_str()) == RF_OK);
  CHECK(testutil::ReadFile(csv).rfind("true_class,pred_class,p_0,p_1,p_2\n", 0) == 0);

  double cv = -1;
  REQUIRE(rf_cross_validate(cfg, train, 5, 1, &cv) == RF_OK);
  CHECK(cv >= 0.0);
  char* report = nullptr;
  rf_model* tuned = nullptr;
  REQUIRE(rf_tune(cfg, train, "trees=2,4;group_size=2,3", 3, 1, &report, &tuned) == RF_OK);
  CHECK(Take(report).find("cv_error") != std::string::npos);
  CHECK(rf_tune(cfg, train, "trees=", 3, 1, &report, nullptr) != RF_OK);

  rf_model_free(tuned);
  rf_model_free(back);
  rf_model_free(model);
  rf_config_free(cfg);
  rf_dataset_free(train);
  rf_dataset_free(test);
  rf_dataset_free(data);
}

TEST_CASE("timing and contract") {
  rf_timing_model* tm = nullptr;
  REQUIRE(rf_timing_published(&tm) == RF_OK);
  double v = 0;
  REQUIRE(rf_timing_predict(tm, 1000, 100, &v) == RF_OK);
  CHECK(std::abs(v - 0.8581) <= 1e-9);
  CHECK(std::string(rf_timing_unit(tm)) == "hours");
  double lo = 0, hi = 0;
  CHECK(rf_timing_interval(tm, 1000, 100, 0.05, &lo, &hi) == RF_ERR_UNFITTED);
  rf_timing_free(tm);

  rf_dataset* data = nullptr;
  REQUIRE(rf_dataset_make_oblique(80, 5, 2, 0.3, 1, &data) == RF_OK);
  rf_config* cfg = nullptr;
  REQUIRE(rf_config_create("rotf", 2, &cfg) == RF_OK);
  rf_config_set(cfg, "trees", 6);
  rf_contract_options opts = rf_contract_defaults();
  CHECK(opts.e_min == 50);
  CHECK(opts.e_max == 200);
  opts.budget_seconds = 1e9;
  rf_model* model = nullptr;
  char* log = nullptr;
  char* summary = nullptr;
  REQUIRE(rf_contract_train(cfg, data, nullptr, &opts, &model, &log, &summary) == RF_OK);
  CHECK(rf_model_num_trees(model) == 6);
  CHECK(Take(log).rfind("index,phase,subsample_size,cap,seconds,t_hat,elapsed", 0) == 0);
  CHECK(Take(summary).find("delegated") != std::string::npos);
  rf_model_free(model);
  rf_config_free(cfg);
  rf_dataset_free(data);
}

TEST_CASE("statistics") {
  const double x[] = {1, 2, 3, 4, 5, 6};
  const double y[] = {0.5, 1.2, 2.0, 3.1, 4.05, 5.3};
  double p = 0;
  REQUIRE(rf_wilcoxon(x, y, 6, &p) == RF_OK);
  CHECK(p == doctest::Approx(0.03125));
  REQUIRE(rf_paired_t(x, x, 6, &p) == RF_OK);
  CHECK(p == 1.0);
  CHECK(rf_wilcoxon(nullptr, y, 6, &p) == RF_ERR_INVALID_ARGUMENT);
}

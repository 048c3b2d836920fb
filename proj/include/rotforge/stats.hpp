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

// Tests for comparing classifiers: paired tests over resamples or datasets,
// Friedman over datasets, Holm-corrected pairwise Wilcoxon cliques, and the
// critical-difference diagram built from them.

#ifndef ROTFORGE_STATS_HPP
#define ROTFORGE_STATS_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rotforge/common.hpp"

namespace rotforge {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;        // pairs used (nonzero differences for Wilcoxon)
  bool exact = false;
  bool degenerate = false;  // all-zero or zero-variance differences
};

inline constexpr std::size_t kWilcoxonExactLimit = 20;

// Two-sided signed-rank test on x - y. Zero differences are dropped and tied
// magnitudes share mid-ranks; the statistic is W+. Exact null distribution up
// to 20 nonzero pairs, normal approximation with tie and continuity
// correction above.
TestResult WilcoxonSignedRank(const std::vector<double>& x, const std::vector<double>& y);

// Exact two-sided p for a given W+ computed from doubled ranks (for tests).
double WilcoxonExactP(const std::vector<double>& abs_ranks, double w_plus);

TestResult PairedT(const std::vector<double>& x, const std::vector<double>& y);

enum class Metric { kError, kBalancedError, kAuc, kNll, kBuildSeconds };
const char* MetricName(Metric metric);
Metric ParseMetric(const std::string& name);
bool LowerIsBetter(Metric metric);

struct ResultsMatrix {
  std::vector<std::string> classifiers;  // K
  std::vector<std::string> datasets;     // N
  Matrix means;                          // N x K
  // [dataset][classifier][resample], when loaded from per-resample rows.
  std::vector<std::vector<std::vector<double>>> per_resample;
  bool lower_is_better = true;

  std::size_t num_classifiers() const { return classifiers.size(); }
  std::size_t num_datasets() const { return datasets.size(); }
  std::vector<double> Column(std::size_t k) const;
};

// Rows "dataset,classifier,resample,error,balanced_error,auc,nll,build_seconds"
// from one or more files. Every (dataset, classifier) cell must be present
// with the same resample count. Classifier and dataset order follow first
// appearance.
ResultsMatrix LoadResults(const std::vector<std::filesystem::path>& paths, Metric metric);

// Per-row ranks (1 = best), mid-ranks for ties, averaged over rows.
std::vector<double> MeanRanks(const ResultsMatrix& results);

struct FriedmanResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int dof = 0;
  std::vector<double> mean_ranks;
};

FriedmanResult Friedman(const ResultsMatrix& results);

// Step-down: reject the i-th smallest p (0-based) while p <= alpha / (M - i).
std::vector<bool> HolmStepDown(const std::vector<double>& p_values, double alpha);

struct CliqueReport {
  std::vector<std::string> classifiers;
  std::vector<double> average_ranks;
  Matrix pairwise_p;                        // K x K, 1 on the diagonal
  std::vector<std::vector<bool>> rejected;  // K x K
  std::vector<std::vector<std::size_t>> cliques;  // indices, in rank order
  double alpha = 0.05;
  std::optional<FriedmanResult> friedman;

  nlohmann::json ToJson() const;
};

// Orders classifiers by mean rank; a clique is a maximal run of rank-adjacent
// classifiers with no rejected pair inside. Singletons are cliques too.
std::vector<std::vector<std::size_t>> FormCliques(const std::vector<double>& ranks,
                                                  const std::vector<std::vector<bool>>& rejected);

CliqueReport HolmCliques(const ResultsMatrix& results, double alpha = 0.05);

// Writes <stem>.json and <stem>.svg; bars are drawn for cliques of two or more.
std::string RenderCdSvg(const CliqueReport& report);
void WriteCdDiagram(const CliqueReport& report, const std::filesystem::path& stem);

}  // namespace rotforge

#endif  // ROTFORGE_STATS_HPP

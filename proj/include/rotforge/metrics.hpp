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

#ifndef ROTFORGE_METRICS_HPP
#define ROTFORGE_METRICS_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "rotforge/common.hpp"

namespace rotforge {

struct Dataset;
class ForestModel;

struct PredictionRecord {
  int true_class = 0;
  std::vector<double> distribution;
  int predicted_class = 0;

  // Fills predicted_class by argmax, ties to the lowest index.
  static PredictionRecord Make(int true_class, std::vector<double> distribution);
};

inline constexpr double kNllEpsilon = 1e-16;

double ErrorRate(const std::vector<PredictionRecord>& preds);

// 1 - mean per-class recall over the classes present among the true labels.
// Absent classes are skipped and counted in *absent_classes when given.
double BalancedError(const std::vector<PredictionRecord>& preds, std::size_t num_classes,
                     std::size_t* absent_classes = nullptr);

// One-vs-rest rank-sum AUC for class j using distribution[j] as the score,
// mid-ranks for ties. NaN when the class has no positives or no negatives.
double ClassAuc(const std::vector<PredictionRecord>& preds, std::size_t j);

// Train-frequency weighted mean of the defined per-class AUCs (weights
// renormalised over the defined ones). Two classes: the AUC of the class that
// is rarer in training, ties to the lower index.
double WeightedAuc(const std::vector<PredictionRecord>& preds,
                   const std::vector<std::size_t>& train_class_counts);

// Mean of -log2(max(p_true, 1e-16)).
double NegativeLogLikelihood(const std::vector<PredictionRecord>& preds);

struct MetricReport {
  double error = 0.0;
  double balanced_error = 0.0;
  double auc = 0.0;
  double nll = 0.0;
  std::size_t n_test = 0;
  double build_seconds = 0.0;
  std::size_t absent_classes = 0;
};

MetricReport Evaluate(const std::vector<PredictionRecord>& preds,
                      const std::vector<std::size_t>& train_class_counts);

std::vector<PredictionRecord> PredictAll(const ForestModel& model, const Dataset& test);

// dataset,classifier,resample,error,balanced_error,auc,nll,build_seconds
std::string MetricsCsvHeader();
std::string MetricsCsvRow(const std::string& dataset, const std::string& classifier,
                          std::size_t resample, const MetricReport& report);

// true_class,pred_class,p_0..p_{c-1}, 17 significant digits.
std::string PredictionsCsv(const std::vector<PredictionRecord>& preds, std::size_t num_classes);

}  // namespace rotforge

#endif  // ROTFORGE_METRICS_HPP

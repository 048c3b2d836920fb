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

#include "rotforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "rotforge/dataset.hpp"
#include "rotforge/forest.hpp"
#include "text_util.hpp"

namespace rotforge {
namespace {

void RequireNonEmpty(const std::vector<PredictionRecord>& preds) {
  if (preds.empty()) throw Error(ErrorCode::kInvalidArgument, "no predictions");
}

}  // namespace

PredictionRecord PredictionRecord::Make(int true_class, std::vector<double> distribution) {
  PredictionRecord r;
  r.true_class = true_class;
  r.predicted_class = ForestModel::ArgMax(distribution);
  r.distribution = std::move(distribution);
  return r;
}

double ErrorRate(const std::vector<PredictionRecord>& preds) {
  RequireNonEmpty(preds);
  std::size_t wrong = 0;
  for (const auto& p : preds) wrong += p.predicted_class != p.true_class;
  return static_cast<double>(wrong) / static_cast<double>(preds.size());
}

double BalancedError(const std::vector<PredictionRecord>& preds, std::size_t num_classes,
                     std::size_t* absent_classes) {
  RequireNonEmpty(preds);
  std::vector<std::size_t> total(num_classes, 0), correct(num_classes, 0);
  for (const auto& p : preds) {
    if (p.true_class < 0 || static_cast<std::size_t>(p.true_class) >= num_classes) {
      throw Error(ErrorCode::kInvalidArgument, "true class out of range");
    }
    ++total[p.true_class];
    correct[p.true_class] += p.predicted_class == p.true_class;
  }
  double recall_sum = 0.0;
  std::size_t present = 0;
  for (std::size_t j = 0; j < num_classes; ++j) {
    if (total[j] == 0) continue;
    recall_sum += static_cast<double>(correct[j]) / static_cast<double>(total[j]);
    ++present;
  }
  if (absent_classes) *absent_classes = num_classes - present;
  return 1.0 - recall_sum / static_cast<double>(present);
}

double ClassAuc(const std::vector<PredictionRecord>& preds, std::size_t j) {
  const std::size_t n = preds.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto score = [&](std::size_t i) {
    if (j >= preds[i].distribution.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "distribution shorter than class index");
    }
    return preds[i].distribution[j];
  };
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = score(i);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a] < s[b]; });
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo;
    while (hi + 1 < n && s[order[hi + 1]] == s[order[lo]]) ++hi;
    const double mid_rank = 0.5 * static_cast<double>(lo + hi) + 1.0;
    for (std::size_t r = lo; r <= hi; ++r) {
      if (preds[order[r]].true_class == static_cast<int>(j)) {
        positive_rank_sum += mid_rank;
        ++positives;
      }
    }
    lo = hi + 1;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) return std::numeric_limits<double>::quiet_NaN();
  const double np = static_cast<double>(positives);
  const double u = positive_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(negatives));
}

double WeightedAuc(const std::vector<PredictionRecord>& preds,
                   const std::vector<std::size_t>& train_class_counts) {
  RequireNonEmpty(preds);
  const std::size_t c = train_class_counts.size();
  if (c == 2) {
    const std::size_t minority = train_class_counts[1] < train_class_counts[0] ? 1 : 0;
    return ClassAuc(preds, minority);
  }
  double weighted = 0.0, weight = 0.0;
  for (std::size_t j = 0; j < c; ++j) {
    const double auc = ClassAuc(preds, j);
    if (std::isnan(auc)) continue;
    const auto w = static_cast<double>(train_class_counts[j]);
    weighted += w * auc;
    weight += w;
  }
  if (weight == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return weighted / weight;
}

double NegativeLogLikelihood(const std::vector<PredictionRecord>& preds) {
  RequireNonEmpty(preds);
  double sum = 0.0;
  for (const auto& p : preds) {
    if (p.true_class < 0 || static_cast<std::size_t>(p.true_class) >= p.distribution.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "true class outside distribution");
    }
    sum -= std::log2(std::max(p.distribution[p.true_class], kNllEpsilon));
  }
  return sum / static_cast<double>(preds.size());
}

MetricReport Evaluate(const std::vector<PredictionRecord>& preds,
                      const std::vector<std::size_t>& train_class_counts) {
  MetricReport r;
  r.error = ErrorRate(preds);
  r.balanced_error = BalancedError(preds, train_class_counts.size(), &r.absent_classes);
  r.auc = WeightedAuc(preds, train_class_counts);
  r.nll = NegativeLogLikelihood(preds);
  r.n_test = preds.size();
  return r;
}

std::vector<PredictionRecord> PredictAll(const ForestModel& model, const Dataset& test) {
  if (test.num_attributes() != model.num_attributes) {
    throw Error(ErrorCode::kDimensionMismatch, "test attributes do not match the model");
  }
  std::vector<PredictionRecord> out;
  out.reserve(test.num_cases());
  for (std::size_t i = 0; i < test.num_cases(); ++i) {
    out.push_back(PredictionRecord::Make(test.labels[i], model.Predict(test.values.row(i))));
  }
  return out;
}

std::string MetricsCsvHeader() {
  return "dataset,classifier,resample,error,balanced_error,auc,nll,build_seconds";
}

std::string MetricsCsvRow(const std::string& dataset, const std::string& classifier,
                          std::size_t resample, const MetricReport& r) {
  using internal::FormatDouble;
  std::ostringstream os;
  os << internal::CsvEscape(dataset) << ',' << internal::CsvEscape(classifier) << ',' << resample
     << ',' << FormatDouble(r.error) << ',' << FormatDouble(r.balanced_error) << ','
     << FormatDouble(r.auc) << ',' << FormatDouble(r.nll) << ',' << FormatDouble(r.build_seconds);
  return os.str();
}

std::string PredictionsCsv(const std::vector<PredictionRecord>& preds, std::size_t num_classes) {
  std::ostringstream os;
  os << "true_class,pred_class";
  for (std::size_t j = 0; j < num_classes; ++j) os << ",p_" << j;
  os << '\n';
  for (const auto& p : preds) {
    os << p.true_class << ',' << p.predicted_class;
    for (std::size_t j = 0; j < num_classes; ++j) {
      os << ',' << internal::FormatDouble(j < p.distribution.size() ? p.distribution[j] : 0.0);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace rotforge

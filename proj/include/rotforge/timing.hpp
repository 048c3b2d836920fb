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

// Build-time prediction for a full rotation forest (k=200, f=3, p=0.5):
//
//   t(n, m) = b0 + bn*n + bm*m + bmn*m*n  [+ bnlogn*m*n*ln(n)]
//
// fitted by least squares, with the usual prediction interval
// yhat +- s * t_{1-a/2,dof} * sqrt(1 + x0' (X'X)^-1 x0).

#ifndef ROTFORGE_TIMING_HPP
#define ROTFORGE_TIMING_HPP

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rotforge/common.hpp"

namespace rotforge {

enum class TimeUnit { kSeconds, kMinutes, kHours };

const char* TimeUnitName(TimeUnit unit);
TimeUnit ParseTimeUnit(const std::string& name);
double SecondsPerUnit(TimeUnit unit);

// Tree count the timing observations refer to.
inline constexpr int kReferenceTrees = 200;

struct TimingObservation {
  std::string dataset;
  double n = 0.0;
  double m = 0.0;
  double seconds = 0.0;
};

std::vector<TimingObservation> LoadTimingObservations(const std::filesystem::path& path);
void SaveTimingObservations(const std::vector<TimingObservation>& obs,
                            const std::filesystem::path& path);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

class TimingModel {
 public:
  // b0, bn, bm, bmn and, when include_nlogn, bnlogn.
  std::vector<double> coefficients;
  bool include_nlogn = false;
  double residual_std = 0.0;
  int dof = 0;
  double calibration_scale = 1.0;
  TimeUnit unit = TimeUnit::kSeconds;

  // The published UCI/UCR fit (time in hours), with no design matrix, so
  // intervals are unavailable until refitted.
  static TimingModel Published();

  bool fitted() const { return !scaled_inverse_.empty(); }

  std::vector<double> Regressors(double n, double m) const;

  // In the model's unit, including calibration_scale.
  double Predict(double n, double m) const;
  double PredictSeconds(double n, double m) const {
    return Predict(n, m) * SecondsPerUnit(unit);
  }

  // Throws kUnfitted when no design inverse is stored.
  Interval PredictionInterval(double n, double m, double alpha = 0.05) const;
  double UpperBoundSeconds(double n, double m, double alpha = 0.05) const {
    return PredictionInterval(n, m, alpha).high * SecondsPerUnit(unit);
  }

  // (X'X)^-1 in the original regressor scale.
  Matrix XtxInverse() const;

  nlohmann::json ToJson() const;
  static TimingModel FromJson(const nlohmann::json& j);
  void Save(const std::filesystem::path& path) const;
  static TimingModel Load(const std::filesystem::path& path);

 private:
  friend TimingModel FitTimingModel(const std::vector<TimingObservation>&, bool, TimeUnit);
  // (Xs'Xs)^-1 for the column-scaled design Xs = X diag(1/scale).
  Matrix scaled_inverse_;
  std::vector<double> column_scale_;
};

// Ordinary least squares through Householder QR on the column-scaled design.
// Needs at least 6 observations and a full-rank design.
TimingModel FitTimingModel(const std::vector<TimingObservation>& observations,
                           bool include_nlogn = false, TimeUnit unit = TimeUnit::kSeconds);

// Times `runner` (which returns the seconds one repetition took) and returns
// local / reference. Repeats while the total stays under 10 ms.
double Calibrate(const std::function<double()>& runner, double reference_seconds);

// The fixed calibration workload: rotation forest, k=20, on the synthetic
// oblique dataset with n=2000, m=60, seed 0. Returns elapsed seconds.
double RunReferenceWorkload();

// Largest attribute count whose predicted build time is the full prediction
// divided by the required speed-up t_hat / budget. Clamped to
// [min_attributes, m].
std::size_t EstimateMaxAttributes(std::size_t m, std::size_t n, int e_min, double t_hat,
                                  double budget, const TimingModel& model,
                                  std::size_t min_attributes = 3);

// As above along the case axis, solved by bisection; clamped to [2c, n].
std::size_t EstimateMaxCases(std::size_t n, std::size_t m, int e_min, double t_hat,
                             double budget, const TimingModel& model, std::size_t num_classes);

}  // namespace rotforge

#endif  // ROTFORGE_TIMING_HPP

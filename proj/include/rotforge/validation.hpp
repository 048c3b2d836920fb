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

// Classifier specs shared by the tuner, sweeps, benchmarks and the CLI, plus
// stratified k-fold cross-validation, grid tuning and sensitivity sweeps.

#ifndef ROTFORGE_VALIDATION_HPP
#define ROTFORGE_VALIDATION_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rotforge/dataset.hpp"
#include "rotforge/forest.hpp"
#include "rotforge/metrics.hpp"

namespace rotforge {

enum class ClassifierFamily { kForest, kMajority };

struct ClassifierSpec {
  std::string name;
  ClassifierFamily family = ClassifierFamily::kForest;
  ForestConfig forest;

  // rotf, randf, rotf40, rotf100, majority, and the hybrids
  // {rt,c45}_{bag,bag_pca,pca}. Hybrids use the rotation forest defaults.
  static ClassifierSpec FromName(const std::string& name, std::uint64_t seed = 0);
  static std::vector<std::string> KnownNames();
};

// Seed used for resample r of an experiment run with the given seed.
std::uint64_t ResampleSeed(std::uint64_t seed, std::size_t resample);

class TrainedClassifier {
 public:
  std::optional<ForestModel> forest;
  std::vector<double> prior;  // majority family: training class frequencies
  double build_seconds = 0.0;

  std::size_t num_classes() const;
  std::vector<double> Predict(std::span<const double> x) const;
};

TrainedClassifier Train(const ClassifierSpec& spec, const Dataset& train);
std::vector<PredictionRecord> PredictAll(const TrainedClassifier& model, const Dataset& test);

enum class Param { kTrees, kGroupSize, kSampleProportion, kSubspaceSize, kMaxDepth };
const char* ParamName(Param param);
Param ParseParam(const std::string& name);
void ApplyParam(ClassifierSpec& spec, Param param, double value);

struct ParamGrid {
  std::vector<std::pair<Param, std::vector<double>>> axes;

  std::size_t size() const;
  // Cell values in axis order; the last axis varies fastest.
  std::vector<double> Cell(std::size_t index) const;
  std::optional<std::size_t> AxisOf(Param param) const;

  // Tuning ranges: rotation forest trees {10,100..900} x group size {3..12}
  // x proportion {0.1..1.0}; random forest trees x subspace size
  // {sqrt m, log2 m + 1, m/10..m/3} x max depth {0, m/9..m}.
  static ParamGrid RotationForestPreset();
  static ParamGrid RandomForestPreset(std::size_t num_attributes);
};

// Fold id per case. Each class is shuffled with a CounterRng(seed) and dealt
// round-robin, continuing where the previous class stopped, so per-class fold
// counts differ by at most one.
std::vector<int> StratifiedFolds(const std::vector<int>& labels, std::size_t num_classes,
                                 std::size_t folds, std::uint64_t seed);

struct CvResult {
  double error = 0.0;  // pooled over all folds
  std::vector<PredictionRecord> predictions;  // in case order
  std::vector<int> folds;
};

CvResult CrossValidate(const ClassifierSpec& spec, const Dataset& data, std::size_t folds = 10,
                       std::uint64_t seed = 0);

struct TuneResult {
  std::size_t best_cell = 0;
  std::vector<double> best_values;
  double cv_error = 0.0;
  std::vector<double> cell_errors;
  ClassifierSpec best_spec;
  std::optional<TrainedClassifier> model;  // refit on all the data
};

// All cells share one fold assignment. Ties go to fewest trees, then the
// smallest group size, then declaration order. Forest cells differing only
// in tree count are scored from prefixes of one forest per fold.
TuneResult GridTune(const ClassifierSpec& spec, const ParamGrid& grid, const Dataset& data,
                    std::size_t folds = 10, std::uint64_t seed = 0, bool refit = true);

struct SweepPoint {
  double value = 0.0;
  double mean_diff = 0.0;  // error(value) - error(baseline), averaged over datasets
  double ci_low = 0.0;
  double ci_high = 0.0;
  double p_value = 1.0;    // paired t over datasets
};

struct SweepResult {
  Param param = Param::kTrees;
  double baseline = 0.0;
  std::vector<std::string> datasets;
  std::vector<double> values;
  Matrix errors;  // datasets x values, mean test error over resamples
  std::vector<SweepPoint> points;
};

// Each dataset is split by StratifiedResample(resample r, train_fraction);
// the forest for resample r is seeded with ResampleSeed(spec seed, r). With
// fewer than two datasets the interval and p-value are NaN.
SweepResult SensitivitySweep(const std::vector<Dataset>& datasets, const ClassifierSpec& spec,
                             Param param, std::vector<double> values, double baseline,
                             std::size_t resamples, double train_fraction = 0.5);

struct ResampleOutcome {
  TrainedClassifier model;
  std::vector<PredictionRecord> predictions;
  MetricReport report;
};

// Train on the stratified train part of resample r and score the test part.
ResampleOutcome RunResample(const ClassifierSpec& spec, const Split& split);

}  // namespace rotforge

#endif  // ROTFORGE_VALIDATION_HPP

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

#include "rotforge/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "rotforge/random.hpp"
#include "rotforge/stats.hpp"

namespace rotforge {
namespace {

using Clock = std::chrono::steady_clock;

int RoundPositive(double v) { return std::max(1, static_cast<int>(std::lround(v))); }

double PooledError(const std::vector<PredictionRecord>& preds) { return ErrorRate(preds); }

}  // namespace

ClassifierSpec ClassifierSpec::FromName(const std::string& name, std::uint64_t seed) {
  ClassifierSpec spec;
  spec.name = name;
  if (name == "majority") {
    spec.family = ClassifierFamily::kMajority;
  } else if (name == "rotf") {
    spec.forest = ForestConfig::RotationForestDefaults();
  } else if (name == "randf") {
    spec.forest = ForestConfig::RandomForestDefaults();
  } else if (name == "rotf40" || name == "rotf100") {
    spec.forest = ForestConfig::RotationForestDefaults();
    spec.forest.max_attributes_per_tree = name == "rotf40" ? 40 : 100;
  } else {
    const auto cut = name.find('_');
    if (cut == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "unknown classifier '" + name + "'");
    }
    spec.forest = ForestConfig::RotationForestDefaults();
    try {
      spec.forest.base = ParseBaseLearner(name.substr(0, cut));
      spec.forest.transform = ParseTransform(name.substr(cut + 1));
    } catch (const Error&) {
      throw Error(ErrorCode::kInvalidArgument, "unknown classifier '" + name + "'");
    }
  }
  spec.forest.seed = seed;
  return spec;
}

std::vector<std::string> ClassifierSpec::KnownNames() {
  return {"rotf",   "randf",      "rotf40", "rotf100", "rt_bag",      "rt_bag_pca",
          "rt_pca", "c45_bag",    "c45_bag_pca", "c45_pca", "majority"};
}

std::uint64_t ResampleSeed(std::uint64_t seed, std::size_t resample) {
  return resample == 0 ? seed : DeriveSeed(seed, 0x5245534dull + resample);
}

std::size_t TrainedClassifier::num_classes() const {
  return forest ? forest->num_classes() : prior.size();
}

std::vector<double> TrainedClassifier::Predict(std::span<const double> x) const {
  if (forest) return forest->Predict(x);
  if (prior.empty()) throw Error(ErrorCode::kUnfitted, "classifier is not trained");
  return prior;
}

TrainedClassifier Train(const ClassifierSpec& spec, const Dataset& train) {
  TrainedClassifier out;
  const auto start = Clock::now();
  if (spec.family == ClassifierFamily::kMajority) {
    train.Validate(false);
    const auto counts = train.ClassCounts();
    out.prior.resize(counts.size());
    for (std::size_t j = 0; j < counts.size(); ++j) {
      out.prior[j] = static_cast<double>(counts[j]) / static_cast<double>(train.num_cases());
    }
  } else {
    out.forest = BuildForest(train, spec.forest);
  }
  out.build_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

std::vector<PredictionRecord> PredictAll(const TrainedClassifier& model, const Dataset& test) {
  if (model.forest) return PredictAll(*model.forest, test);
  std::vector<PredictionRecord> out;
  for (std::size_t i = 0; i < test.num_cases(); ++i) {
    out.push_back(PredictionRecord::Make(test.labels[i], model.Predict(test.values.row(i))));
  }
  return out;
}

const char* ParamName(Param param) {
  switch (param) {
    case Param::kTrees: return "trees";
    case Param::kGroupSize: return "group_size";
    case Param::kSampleProportion: return "proportion";
    case Param::kSubspaceSize: return "subspace";
    case Param::kMaxDepth: return "max_depth";
  }
  return "?";
}

Param ParseParam(const std::string& name) {
  for (Param p : {Param::kTrees, Param::kGroupSize, Param::kSampleProportion,
                  Param::kSubspaceSize, Param::kMaxDepth}) {
    if (name == ParamName(p)) return p;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown parameter '" + name + "'");
}

void ApplyParam(ClassifierSpec& spec, Param param, double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::kInvalidArgument, "parameter value not finite");
  auto as_int = [&](int lo) {
    if (value != std::floor(value) || value < lo) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(ParamName(param)) + " must be an integer >= " + std::to_string(lo));
    }
    return static_cast<int>(value);
  };
  switch (param) {
    case Param::kTrees: spec.forest.trees = as_int(1); break;
    case Param::kGroupSize: spec.forest.rotation.group_size = as_int(1); break;
    case Param::kSampleProportion:
      if (!(value > 0.0 && value <= 1.0)) {
        throw Error(ErrorCode::kInvalidArgument, "proportion must lie in (0, 1]");
      }
      spec.forest.rotation.sample_proportion = value;
      break;
    case Param::kSubspaceSize: spec.forest.random_subspace_size = as_int(0); break;
    case Param::kMaxDepth: spec.forest.max_depth = as_int(0); break;
  }
}

std::size_t ParamGrid::size() const {
  std::size_t total = 1;
  for (const auto& [param, values] : axes) total *= values.size();
  return axes.empty() ? 1 : total;
}

std::vector<double> ParamGrid::Cell(std::size_t index) const {
  std::vector<double> out(axes.size());
  for (std::size_t a = axes.size(); a-- > 0;) {
    const auto& values = axes[a].second;
    out[a] = values[index % values.size()];
    index /= values.size();
  }
  return out;
}

std::optional<std::size_t> ParamGrid::AxisOf(Param param) const {
  for (std::size_t a = 0; a < axes.size(); ++a) {
    if (axes[a].first == param) return a;
  }
  return std::nullopt;
}

namespace {

std::vector<double> TreeCountRange() {
  std::vector<double> trees = {10};
  for (int t = 100; t <= 900; t += 100) trees.push_back(t);
  return trees;
}

}  // namespace

ParamGrid ParamGrid::RotationForestPreset() {
  ParamGrid grid;
  std::vector<double> groups, proportions;
  for (int f = 3; f <= 12; ++f) groups.push_back(f);
  for (int p = 1; p <= 10; ++p) proportions.push_back(p / 10.0);
  grid.axes = {{Param::kTrees, TreeCountRange()},
               {Param::kGroupSize, groups},
               {Param::kSampleProportion, proportions}};
  return grid;
}

ParamGrid ParamGrid::RandomForestPreset(std::size_t num_attributes) {
  const double m = static_cast<double>(std::max<std::size_t>(num_attributes, 1));
  std::vector<double> subspace = {static_cast<double>(RoundPositive(std::sqrt(m))),
                                  static_cast<double>(RoundPositive(std::log2(m) + 1.0))};
  for (int d = 10; d >= 3; --d) subspace.push_back(RoundPositive(m / d));
  std::vector<double> depth = {0};
  for (int d = 9; d >= 1; --d) depth.push_back(RoundPositive(m / d));
  ParamGrid grid;
  grid.axes = {{Param::kTrees, TreeCountRange()},
               {Param::kSubspaceSize, subspace},
               {Param::kMaxDepth, depth}};
  return grid;
}

std::vector<int> StratifiedFolds(const std::vector<int>& labels, std::size_t num_classes,
                                 std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorCode::kInvalidArgument, "need at least 2 folds");
  if (labels.size() < folds) {
    throw Error(ErrorCode::kInvalidArgument, "fewer cases than folds");
  }
  std::vector<std::vector<std::size_t>> by_class(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_classes) {
      throw Error(ErrorCode::kInvalidArgument, "label out of range");
    }
    by_class[labels[i]].push_back(i);
  }
  CounterRng rng(seed);
  std::vector<int> out(labels.size(), 0);
  std::size_t next = 0;
  for (auto& members : by_class) {
    rng.Shuffle(members);
    for (std::size_t idx : members) {
      out[idx] = static_cast<int>(next);
      next = (next + 1) % folds;
    }
  }
  return out;
}

namespace {

std::vector<std::size_t> FoldRows(const std::vector<int>& folds, int fold, bool inside) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < folds.size(); ++i) {
    if ((folds[i] == fold) == inside) rows.push_back(i);
  }
  return rows;
}

}  // namespace

CvResult CrossValidate(const ClassifierSpec& spec, const Dataset& data, std::size_t folds,
                       std::uint64_t seed) {
  CvResult result;
  result.folds = StratifiedFolds(data.labels, data.num_classes(), folds, seed);
  result.predictions.resize(data.num_cases());
  for (std::size_t f = 0; f < folds; ++f) {
    const auto test_rows = FoldRows(result.folds, static_cast<int>(f), true);
    if (test_rows.empty()) continue;
    const Dataset train = data.Subset(FoldRows(result.folds, static_cast<int>(f), false));
    const Dataset test = data.Subset(test_rows);
    const auto model = Train(spec, train);
    const auto preds = PredictAll(model, test);
    for (std::size_t i = 0; i < test_rows.size(); ++i) result.predictions[test_rows[i]] = preds[i];
  }
  result.error = PooledError(result.predictions);
  return result;
}

TuneResult GridTune(const ClassifierSpec& spec, const ParamGrid& grid, const Dataset& data,
                    std::size_t folds, std::uint64_t seed, bool refit) {
  const std::size_t cells = grid.size();
  if (cells == 0) throw Error(ErrorCode::kInvalidArgument, "empty parameter grid");
  const auto fold_ids = StratifiedFolds(data.labels, data.num_classes(), folds, seed);
  std::vector<std::vector<PredictionRecord>> pooled(
      cells, std::vector<PredictionRecord>(data.num_cases()));

  const auto tree_axis = spec.family == ClassifierFamily::kForest
                             ? grid.AxisOf(Param::kTrees)
                             : std::optional<std::size_t>{};
  // Cells grouped by everything except the tree count.
  std::map<std::vector<double>, std::vector<std::size_t>> groups;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    auto key = grid.Cell(cell);
    if (tree_axis) key[*tree_axis] = 0.0;
    groups[key].push_back(cell);
  }

  for (std::size_t f = 0; f < folds; ++f) {
    const auto test_rows = FoldRows(fold_ids, static_cast<int>(f), true);
    if (test_rows.empty()) continue;
    const Dataset train = data.Subset(FoldRows(fold_ids, static_cast<int>(f), false));
    const Dataset test = data.Subset(test_rows);
    for (const auto& [key, members] : groups) {
      if (!tree_axis) {
        for (std::size_t cell : members) {
          ClassifierSpec s = spec;
          const auto values = grid.Cell(cell);
          for (std::size_t a = 0; a < values.size(); ++a) ApplyParam(s, grid.axes[a].first, values[a]);
          const auto preds = PredictAll(Train(s, train), test);
          for (std::size_t i = 0; i < test_rows.size(); ++i) pooled[cell][test_rows[i]] = preds[i];
        }
        continue;
      }
      ClassifierSpec s = spec;
      const auto first = grid.Cell(members.front());
      for (std::size_t a = 0; a < first.size(); ++a) {
        if (a != *tree_axis) ApplyParam(s, grid.axes[a].first, first[a]);
      }
      std::vector<std::size_t> sizes;
      for (std::size_t cell : members) {
        ApplyParam(s, Param::kTrees, grid.Cell(cell)[*tree_axis]);
        sizes.push_back(static_cast<std::size_t>(s.forest.trees));
      }
      s.forest.trees = static_cast<int>(*std::max_element(sizes.begin(), sizes.end()));
      const ForestModel model = BuildForest(train, s.forest);
      for (std::size_t i = 0; i < test_rows.size(); ++i) {
        auto dists = model.PredictPrefixes(test.values.row(i), sizes);
        for (std::size_t c = 0; c < members.size(); ++c) {
          pooled[members[c]][test_rows[i]] =
              PredictionRecord::Make(test.labels[i], std::move(dists[c]));
        }
      }
    }
  }

  TuneResult result;
  result.cell_errors.resize(cells);
  for (std::size_t cell = 0; cell < cells; ++cell) result.cell_errors[cell] = PooledError(pooled[cell]);
  const auto group_axis = grid.AxisOf(Param::kGroupSize);
  auto better = [&](std::size_t a, std::size_t b) {
    if (result.cell_errors[a] != result.cell_errors[b]) {
      return result.cell_errors[a] < result.cell_errors[b];
    }
    const auto va = grid.Cell(a), vb = grid.Cell(b);
    if (tree_axis && va[*tree_axis] != vb[*tree_axis]) return va[*tree_axis] < vb[*tree_axis];
    if (group_axis && va[*group_axis] != vb[*group_axis]) return va[*group_axis] < vb[*group_axis];
    return a < b;
  };
  std::size_t best = 0;
  for (std::size_t cell = 1; cell < cells; ++cell) {
    if (better(cell, best)) best = cell;
  }
  result.best_cell = best;
  result.best_values = grid.Cell(best);
  result.cv_error = result.cell_errors[best];
  result.best_spec = spec;
  for (std::size_t a = 0; a < result.best_values.size(); ++a) {
    ApplyParam(result.best_spec, grid.axes[a].first, result.best_values[a]);
  }
  if (refit) result.model = Train(result.best_spec, data);
  return result;
}

SweepResult SensitivitySweep(const std::vector<Dataset>& datasets, const ClassifierSpec& spec,
                             Param param, std::vector<double> values, double baseline,
                             std::size_t resamples, double train_fraction) {
  if (datasets.empty() || values.empty() || resamples == 0) {
    throw Error(ErrorCode::kInvalidArgument, "sweep needs datasets, values and resamples");
  }
  if (std::find(values.begin(), values.end(), baseline) == values.end()) values.push_back(baseline);
  const std::size_t nv = values.size();
  const bool by_prefix = param == Param::kTrees && spec.family == ClassifierFamily::kForest;

  SweepResult result;
  result.param = param;
  result.baseline = baseline;
  result.values = values;
  result.errors = Matrix(datasets.size(), nv);
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    result.datasets.push_back(datasets[d].name);
    for (std::size_t r = 0; r < resamples; ++r) {
      ResamplePlan plan;
      plan.resample_id = r;
      plan.train_fraction = train_fraction;
      const Split split = StratifiedResample(datasets[d], plan);
      ClassifierSpec base = spec;
      base.forest.seed = ResampleSeed(spec.forest.seed, r);
      if (by_prefix) {
        std::vector<std::size_t> sizes;
        for (double v : values) {
          ApplyParam(base, Param::kTrees, v);
          sizes.push_back(static_cast<std::size_t>(base.forest.trees));
        }
        base.forest.trees = static_cast<int>(*std::max_element(sizes.begin(), sizes.end()));
        const ForestModel model = BuildForest(split.train, base.forest);
        std::vector<std::size_t> wrong(nv, 0);
        for (std::size_t i = 0; i < split.test.num_cases(); ++i) {
          const auto dists = model.PredictPrefixes(split.test.values.row(i), sizes);
          for (std::size_t v = 0; v < nv; ++v) {
            wrong[v] += ForestModel::ArgMax(dists[v]) != split.test.labels[i];
          }
        }
        for (std::size_t v = 0; v < nv; ++v) {
          result.errors(d, v) +=
              static_cast<double>(wrong[v]) / static_cast<double>(split.test.num_cases());
        }
      } else {
        for (std::size_t v = 0; v < nv; ++v) {
          ClassifierSpec s = base;
          ApplyParam(s, param, values[v]);
          result.errors(d, v) += ErrorRate(PredictAll(Train(s, split.train), split.test));
        }
      }
    }
    for (std::size_t v = 0; v < nv; ++v) result.errors(d, v) /= static_cast<double>(resamples);
  }

  const std::size_t base_col =
      static_cast<std::size_t>(std::find(values.begin(), values.end(), baseline) - values.begin());
  const std::size_t n = datasets.size();
  for (std::size_t v = 0; v < nv; ++v) {
    SweepPoint point;
    point.value = values[v];
    std::vector<double> at_value(n), at_base(n);
    for (std::size_t d = 0; d < n; ++d) {
      at_value[d] = result.errors(d, v);
      at_base[d] = result.errors(d, base_col);
      point.mean_diff += at_value[d] - at_base[d];
    }
    point.mean_diff /= static_cast<double>(n);
    if (n < 2) {
      point.ci_low = point.ci_high = point.p_value = std::numeric_limits<double>::quiet_NaN();
    } else {
      double ss = 0.0;
      for (std::size_t d = 0; d < n; ++d) {
        const double diff = at_value[d] - at_base[d] - point.mean_diff;
        ss += diff * diff;
      }
      const double se = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
      const boost::math::students_t dist(static_cast<double>(n - 1));
      const double t = boost::math::quantile(dist, 0.975);
      point.ci_low = point.mean_diff - t * se;
      point.ci_high = point.mean_diff + t * se;
      point.p_value = PairedT(at_value, at_base).p_value;
    }
    result.points.push_back(point);
  }
  return result;
}

ResampleOutcome RunResample(const ClassifierSpec& spec, const Split& split) {
  ResampleOutcome out;
  out.model = Train(spec, split.train);
  out.predictions = PredictAll(out.model, split.test);
  out.report = Evaluate(out.predictions, split.train.ClassCounts());
  out.report.build_seconds = out.model.build_seconds;
  return out;
}

}  // namespace rotforge

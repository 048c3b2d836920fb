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

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "doctest.h"
#include "rotforge/dataset.hpp"
#include "rotforge/metrics.hpp"
#include "rotforge/random.hpp"
#include "rotforge/synthetic.hpp"
#include "rotforge/validation.hpp"

using namespace rotforge;

namespace {

std::vector<PredictionRecord> Binary(const std::vector<double>& scores, const std::vector<int>& y) {
  std::vector<PredictionRecord> preds;
  for (std::size_t i = 0; i < y.size(); ++i) {
    preds.push_back(PredictionRecord::Make(y[i], {1.0 - scores[i], scores[i]}));
  }
  return preds;
}

// Fraction of (positive, negative) pairs ordered correctly, ties half.
double PairAuc(const std::vector<PredictionRecord>& preds, std::size_t j) {
  double good = 0.0, pairs = 0.0;
  for (const auto& p : preds) {
    if (p.true_class != static_cast<int>(j)) continue;
    for (const auto& q : preds) {
      if (q.true_class == static_cast<int>(j)) continue;
      pairs += 1;
      if (p.distribution[j] > q.distribution[j]) good += 1;
      if (p.distribution[j] == q.distribution[j]) good += 0.5;
    }
  }
  return pairs > 0 ? good / pairs : std::nan("");
}

Dataset Oblique(std::size_t n, std::size_t m, std::size_t c, std::uint64_t seed) {
  ObliqueSpec spec;
  spec.cases = n;
  spec.attributes = m;
  spec.classes = c;
  spec.seed = seed;
  return MakeObliqueDataset(spec);
}

ClassifierSpec SmallRotf(int trees, std::uint64_t seed) {
  ClassifierSpec spec = ClassifierSpec::FromName("rotf", seed);
  spec.forest.trees = trees;
  return spec;
}

}  // namespace

TEST_CASE("error rate") {
  const auto right = Binary({0.9, 0.1}, {1, 0});
  CHECK(ErrorRate(right) == 0.0);
  const auto wrong = Binary({0.1, 0.9}, {1, 0});
  CHECK(ErrorRate(wrong) == 1.0);
  const auto three = Binary({0.9, 0.1, 0.8, 0.7}, {1, 0, 1, 0});
  CHECK(ErrorRate(three) == 0.25);
}

TEST_CASE("balanced error") {
  std::vector<PredictionRecord> preds;
  for (int i = 0; i < 100; ++i) preds.push_back(PredictionRecord::Make(i < 90 ? 0 : 1, {0.8, 0.2}));
  CHECK(BalancedError(preds, 2) == doctest::Approx(0.5));
  CHECK(ErrorRate(preds) == doctest::Approx(0.1));

  const auto perfect = Binary({0.9, 0.1, 0.8}, {1, 0, 1});
  CHECK(BalancedError(perfect, 2) == 0.0);

  std::size_t absent = 0;
  const auto two = Binary({0.9, 0.1}, {1, 0});
  CHECK(BalancedError(two, 3, &absent) == 0.0);
  CHECK(absent == 1);
}

TEST_CASE("auc examples") {
  const std::vector<std::size_t> counts{10, 5};
  CHECK(WeightedAuc(Binary({0.9, 0.8, 0.4, 0.3}, {1, 1, 0, 0}), counts) == 1.0);
  CHECK(WeightedAuc(Binary({0.9, 0.8, 0.7, 0.6}, {1, 0, 1, 0}), counts) == 0.75);
  CHECK(WeightedAuc(Binary({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0}), counts) == 0.5);
  // The rarer training class is the positive one.
  CHECK(WeightedAuc(Binary({0.9, 0.8, 0.7, 0.6}, {1, 0, 1, 0}), {5, 10}) == 0.75);
  CHECK(std::isnan(ClassAuc(Binary({0.9, 0.8}, {1, 1}), 1)));
}

TEST_CASE("property: weighted auc against pair counting") {
  CounterRng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t c = 2 + rng.Below(3);
    const std::size_t n = 5 + rng.Below(40);
    std::vector<PredictionRecord> preds;
    std::vector<PredictionRecord> moved;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> p(c), q(c);
      double sum = 0.0;
      for (auto& v : p) {
        v = static_cast<double>(rng.Below(6));
        sum += v;
      }
      for (std::size_t j = 0; j < c; ++j) {
        p[j] = sum > 0 ? p[j] / sum : 1.0 / static_cast<double>(c);
        q[j] = std::exp(3 * p[j]) + 2;
      }
      const int y = static_cast<int>(rng.Below(c));
      preds.push_back(PredictionRecord::Make(y, p));
      moved.push_back(PredictionRecord::Make(y, q));
    }
    std::vector<std::size_t> train(c);
    for (auto& k : train) k = 1 + rng.Below(20);

    double want = 0.0;
    if (c == 2) {
      want = PairAuc(preds, train[1] < train[0] ? 1 : 0);
    } else {
      double weight = 0.0;
      for (std::size_t j = 0; j < c; ++j) {
        const double a = PairAuc(preds, j);
        if (std::isnan(a)) continue;
        want += a * static_cast<double>(train[j]);
        weight += static_cast<double>(train[j]);
      }
      want = weight > 0 ? want / weight : std::nan("");
    }
    const double got = WeightedAuc(preds, train);
    if (std::isnan(want)) {
      CHECK(std::isnan(got));
      continue;
    }
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
    CHECK(WeightedAuc(moved, train) == doctest::Approx(got).epsilon(1e-12));
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);
  }
}

TEST_CASE("negative log likelihood") {
  CHECK(NegativeLogLikelihood(Binary({1.0, 0.0}, {1, 0})) == 0.0);
  CHECK(NegativeLogLikelihood(Binary({0.5, 0.5}, {1, 0})) == 1.0);
  CHECK(NegativeLogLikelihood(Binary({0.0}, {1})) == doctest::Approx(53.150849518197795));
  double last = 1e300;
  for (double p = 0.05; p <= 1.0; p += 0.05) {
    const double v = NegativeLogLikelihood(Binary({p}, {1}));
    CHECK(v < last);
    last = v;
  }
}

TEST_CASE("equal recalls give equal balanced and plain error") {
  std::vector<PredictionRecord> preds;
  // Class 0: 8 cases, 2 wrong. Class 1: 4 cases, 1 wrong.
  for (int i = 0; i < 8; ++i) preds.push_back(PredictionRecord::Make(0, i < 2 ? std::vector<double>{0.2, 0.8} : std::vector<double>{0.9, 0.1}));
  for (int i = 0; i < 4; ++i) preds.push_back(PredictionRecord::Make(1, i < 1 ? std::vector<double>{0.7, 0.3} : std::vector<double>{0.4, 0.6}));
  CHECK(BalancedError(preds, 2) == doctest::Approx(ErrorRate(preds)));
  const MetricReport r = Evaluate(preds, {8, 4});
  CHECK(r.n_test == 12);
  CHECK(r.error == doctest::Approx(0.25));
  CHECK(MetricsCsvHeader() == "dataset,classifier,resample,error,balanced_error,auc,nll,build_seconds");
  CHECK(PredictionsCsv(Binary({0.25}, {1}), 2) == "true_class,pred_class,p_0,p_1\n1,0,0.75,0.25\n");
}

TEST_CASE("property: folds partition with balanced class counts") {
  CounterRng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t c = 2 + rng.Below(4);
    const std::size_t n = 10 + rng.Below(200);
    std::vector<int> labels(n);
    for (auto& y : labels) y = static_cast<int>(rng.Below(c));
    const std::size_t k = 2 + rng.Below(9);
    const auto folds = StratifiedFolds(labels, c, k, trial);
    REQUIRE(folds.size() == n);
    CHECK(folds == StratifiedFolds(labels, c, k, trial));
    for (std::size_t j = 0; j < c; ++j) {
      std::vector<int> per(k, 0);
      for (std::size_t i = 0; i < n; ++i) {
        REQUIRE(folds[i] >= 0);
        REQUIRE(folds[i] < static_cast<int>(k));
        if (labels[i] == static_cast<int>(j)) ++per[folds[i]];
      }
      const auto [lo, hi] = std::minmax_element(per.begin(), per.end());
      CHECK(*hi - *lo <= 1);
    }
  }
}

TEST_CASE("cross validation") {
  Dataset even = Oblique(40, 3, 2, 1);
  const CvResult majority = CrossValidate(ClassifierSpec::FromName("majority"), even, 10, 2);
  CHECK(majority.error == 0.5);

  const Dataset d = Oblique(60, 4, 3, 2);
  const ClassifierSpec spec = SmallRotf(5, 7);
  const CvResult a = CrossValidate(spec, d, 5, 9);
  const CvResult b = CrossValidate(spec, d, 5, 9);
  CHECK(a.folds == b.folds);
  CHECK(a.error == b.error);

  // Replay each fold by hand.
  std::size_t wrong = 0;
  for (int f = 0; f < 5; ++f) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < d.num_cases(); ++i) {
      (a.folds[i] == f ? test_rows : train_rows).push_back(i);
    }
    const TrainedClassifier model = Train(spec, d.Subset(train_rows));
    for (std::size_t i : test_rows) {
      const auto p = model.Predict(d.values.row(i));
      CHECK(p == a.predictions[i].distribution);
      wrong += ForestModel::ArgMax(p) != d.labels[i];
    }
  }
  CHECK(a.error == static_cast<double>(wrong) / static_cast<double>(d.num_cases()));
}

TEST_CASE("grid tuning") {
  const Dataset d = Oblique(80, 6, 2, 3);
  ParamGrid one;
  one.axes = {{Param::kTrees, {7}}};
  const TuneResult single = GridTune(SmallRotf(5, 1), one, d, 4, 2);
  CHECK(single.best_values == std::vector<double>{7});
  REQUIRE(single.model);
  CHECK(single.model->forest->members.size() == 7);

  ParamGrid grid;
  grid.axes = {{Param::kTrees, {8, 3}}, {Param::kGroupSize, {2, 3}}, {Param::kSampleProportion, {0.5, 1.0}}};
  const TuneResult r = GridTune(SmallRotf(5, 1), grid, d, 4, 2, false);
  REQUIRE(r.cell_errors.size() == 8);
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    ClassifierSpec spec = SmallRotf(5, 1);
    const auto values = grid.Cell(cell);
    for (std::size_t a = 0; a < values.size(); ++a) ApplyParam(spec, grid.axes[a].first, values[a]);
    CHECK(CrossValidate(spec, d, 4, 2).error == r.cell_errors[cell]);
  }
  const double best = *std::min_element(r.cell_errors.begin(), r.cell_errors.end());
  CHECK(r.cv_error == best);
  // Tie rule: fewest trees, then smallest group size, then declaration order.
  std::size_t expected = grid.size();
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    if (r.cell_errors[cell] != best) continue;
    if (expected == grid.size()) {
      expected = cell;
      continue;
    }
    const auto cv = grid.Cell(cell), ev = grid.Cell(expected);
    if (cv[0] < ev[0] || (cv[0] == ev[0] && cv[1] < ev[1])) expected = cell;
  }
  CHECK(r.best_cell == expected);
}

TEST_CASE("grid tuning ties on separable data") {
  Dataset d = Oblique(40, 2, 2, 4);
  for (std::size_t i = 0; i < d.num_cases(); ++i) {
    d.values(i, 0) = d.labels[i] == 0 ? -1.0 - 0.01 * i : 1.0 + 0.01 * i;
    d.values(i, 1) = d.values(i, 0);
  }
  ParamGrid grid;
  grid.axes = {{Param::kTrees, {20, 4}}, {Param::kGroupSize, {2, 1}}};
  const TuneResult r = GridTune(SmallRotf(5, 3), grid, d, 4, 1, false);
  for (double e : r.cell_errors) CHECK(e == 0.0);
  CHECK(r.best_values == std::vector<double>{4, 1});
}

TEST_CASE("presets") {
  const ParamGrid rotf = ParamGrid::RotationForestPreset();
  CHECK(rotf.size() == 10 * 10 * 10);
  CHECK(rotf.Cell(0) == std::vector<double>{10, 3, 0.1});
  const ParamGrid randf = ParamGrid::RandomForestPreset(100);
  REQUIRE(randf.AxisOf(Param::kSubspaceSize));
  CHECK(randf.size() >= 1);
}

TEST_CASE("sensitivity sweep") {
  std::vector<Dataset> sets;
  for (std::uint64_t s = 0; s < 3; ++s) {
    Dataset d = Oblique(60, 5, 2, 40 + s);
    d.name = "d" + std::to_string(s);
    sets.push_back(d);
  }
  const SweepResult r = SensitivitySweep(sets, SmallRotf(5, 2), Param::kTrees, {1, 5, 15}, 5, 3);
  REQUIRE(r.points.size() == 3);
  CHECK(r.points[1].mean_diff == 0.0);
  CHECK(r.points[1].ci_low == 0.0);
  CHECK(r.points[1].ci_high == 0.0);
  const boost::math::students_t t(2);
  const double q = boost::math::quantile(t, 0.975);
  for (std::size_t v = 0; v < 3; ++v) {
    std::vector<double> diff;
    for (std::size_t d = 0; d < 3; ++d) diff.push_back(r.errors(d, v) - r.errors(d, 1));
    const double mean = (diff[0] + diff[1] + diff[2]) / 3;
    double ss = 0;
    for (double x : diff) ss += (x - mean) * (x - mean);
    const double half = q * std::sqrt(ss / 2) / std::sqrt(3.0);
    CHECK(r.points[v].mean_diff == doctest::Approx(mean).epsilon(1e-12));
    CHECK(r.points[v].ci_low == doctest::Approx(mean - half).epsilon(1e-12));
    CHECK(r.points[v].ci_high == doctest::Approx(mean + half).epsilon(1e-12));
  }
  // Prefix sharing must agree with separate runs.
  ClassifierSpec fifteen = SmallRotf(15, 2);
  double err = 0;
  for (std::size_t res = 0; res < 3; ++res) {
    ResamplePlan plan;
    plan.resample_id = res;
    ClassifierSpec s = fifteen;
    s.forest.seed = ResampleSeed(2, res);
    err += RunResample(s, StratifiedResample(sets[0], plan)).report.error / 3;
  }
  CHECK(r.errors(0, 2) == doctest::Approx(err).epsilon(1e-12));

  const SweepResult lone = SensitivitySweep({sets[0]}, SmallRotf(5, 2), Param::kTrees, {1, 5}, 5, 2);
  CHECK(std::isnan(lone.points[0].ci_low));
}

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
#include <functional>
#include <numeric>
#include <set>

#include "doctest.h"
#include "rotforge/dataset.hpp"
#include "rotforge/random.hpp"
#include "rotforge/synthetic.hpp"
#include "test_util.hpp"

using namespace rotforge;
using testutil::TempDir;
using testutil::WriteFile;

namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

Dataset TwoClass(const std::vector<std::size_t>& counts) {
  Dataset d;
  d.name = "toy";
  d.class_names = {"a", "b"};
  d.class_names.resize(counts.size());
  for (std::size_t j = 2; j < counts.size(); ++j) d.class_names[j] = "c" + std::to_string(j);
  const std::size_t n = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  d.values = Matrix(n, 1);
  d.feature_names = {"x"};
  std::size_t row = 0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    for (std::size_t i = 0; i < counts[j]; ++i, ++row) {
      d.values(row, 0) = static_cast<double>(row);
      d.labels.push_back(static_cast<int>(j));
    }
  }
  return d;
}

}  // namespace

TEST_CASE("ARFF with three instances") {
  TempDir dir("arff");
  const auto path = WriteFile(dir / "tiny.arff",
                              "% comment\n@relation tiny\n"
                              "@attribute x1 numeric\n@attribute 'x 2' REAL\n"
                              "@attribute class {yes,no}\n\n@data\n"
                              "1.5,2,yes\n-3,4e2,no\n0,0,yes\n");
  const Dataset d = LoadArff(path);
  CHECK(d.num_cases() == 3);
  CHECK(d.num_attributes() == 2);
  CHECK(d.num_classes() == 2);
  CHECK(d.class_names == std::vector<std::string>{"yes", "no"});
  CHECK(d.labels == std::vector<int>{0, 1, 0});
  CHECK(d.values(1, 1) == 400.0);
  CHECK(d.values(0, 0) == 1.5);
}

TEST_CASE("ARFF errors") {
  TempDir dir("arff_err");
  const std::string head = "@relation r\n@attribute x numeric\n";
  const auto missing = WriteFile(dir / "m.arff", head + "@attribute class {a,b}\n@data\n?,a\n1,b\n");
  CHECK(CodeOf([&] { LoadArff(missing); }) == ErrorCode::kMissingValue);

  const auto nominal = WriteFile(dir / "n.arff",
                                 head + "@attribute colour {red,blue}\n@attribute class {a,b}\n"
                                        "@data\n1,red,a\n2,blue,b\n");
  CHECK(CodeOf([&] { LoadArff(nominal); }) == ErrorCode::kUnsupportedAttribute);

  const auto str = WriteFile(dir / "s.arff",
                             head + "@attribute s string\n@attribute class {a,b}\n@data\n1,q,a\n");
  CHECK(CodeOf([&] { LoadArff(str); }) == ErrorCode::kUnsupportedAttribute);

  const auto ragged = WriteFile(dir / "r.arff", head + "@attribute class {a,b}\n@data\n1,2,a\n");
  CHECK(CodeOf([&] { LoadArff(ragged); }) == ErrorCode::kParse);

  const auto bad_class = WriteFile(dir / "c.arff", head + "@attribute class {a,b}\n@data\n1,z\n");
  CHECK(CodeOf([&] { LoadArff(bad_class); }) == ErrorCode::kParse);

  CHECK(CodeOf([&] { LoadDataset(dir / "absent.arff"); }) == ErrorCode::kNotFound);
}

TEST_CASE("CSV loading") {
  TempDir dir("csv");
  const auto path = WriteFile(dir / "d.csv", "f1,f2,label\n1,2,b\n3,4,a\n5,6,b\n7,8,a\n");
  const Dataset d = LoadCsv(path);
  CHECK(d.num_cases() == 4);
  CHECK(d.num_attributes() == 2);
  CHECK(d.class_names == std::vector<std::string>{"a", "b"});
  CHECK(d.labels == std::vector<int>{1, 0, 1, 0});
  CHECK(d.feature_names == std::vector<std::string>{"f1", "f2"});

  CsvOptions first;
  first.class_column = 0;
  first.has_header = false;
  const auto p2 = WriteFile(dir / "e.csv", "x,1.5\ny,2.5\n");
  const Dataset e = LoadCsv(p2, first);
  CHECK(e.num_attributes() == 1);
  CHECK(e.values(1, 0) == 2.5);
}

TEST_CASE("CSV errors") {
  TempDir dir("csv_err");
  const auto single = WriteFile(dir / "s.csv", "a,b,c\n1,2,x\n3,4,x\n");
  CHECK(CodeOf([&] { LoadCsv(single); }) == ErrorCode::kSingleClass);
  const auto text = WriteFile(dir / "t.csv", "a,b,c\n1,abc,x\n3,4,y\n");
  CHECK(CodeOf([&] { LoadCsv(text); }) == ErrorCode::kNonNumeric);
  const auto ragged = WriteFile(dir / "r.csv", "a,b,c\n1,2,x\n3,y\n");
  CHECK(CodeOf([&] { LoadCsv(ragged); }) == ErrorCode::kRaggedRows);
}

TEST_CASE("ARFF round trip") {
  TempDir dir("round");
  ObliqueSpec spec;
  spec.cases = 60;
  spec.attributes = 5;
  spec.classes = 3;
  spec.seed = 4;
  const Dataset d = MakeObliqueDataset(spec);
  SaveArff(d, dir / "o.arff");
  const Dataset back = LoadArff(dir / "o.arff");
  CHECK(back.values == d.values);
  CHECK(back.labels == d.labels);
  CHECK(back.class_names == d.class_names);
  CHECK(back.feature_names == d.feature_names);
}

TEST_CASE("quota rule") {
  // 5 + 5 cases at fraction 0.5: floors 2 and 2, the tied leftover goes to
  // class 0.
  CHECK(StratifiedQuotas({5, 5}, 5) == std::vector<std::size_t>{3, 2});
  // 1 + 30 cases, 3 seats: floors 0 and 2, larger remainder to class 1, then
  // the singleton class is clamped up.
  CHECK(StratifiedQuotas({1, 30}, 3) == std::vector<std::size_t>{1, 3});
  CHECK(StratifiedQuotas({6, 3, 1}, 5) == std::vector<std::size_t>{3, 2, 1});
}

TEST_CASE("stratified resample") {
  const Dataset d = TwoClass({5, 5});
  ResamplePlan plan;
  plan.resample_id = 1;
  const Split s = StratifiedResample(d, plan);
  CHECK(s.train.num_cases() == 5);
  CHECK(s.test.num_cases() == 5);
  const auto counts = s.train.ClassCounts();
  CHECK(counts[0] + counts[1] == 5);
  CHECK(counts[0] >= 2);
  CHECK(counts[1] >= 2);

  const Split again = StratifiedResample(d, plan);
  CHECK(again.train_indices == s.train_indices);
  CHECK(again.test_indices == s.test_indices);
  CHECK(again.train == s.train);

  const Dataset tiny = TwoClass({1, 9});
  const Split t = StratifiedResample(tiny, plan);
  CHECK(t.train.ClassCounts()[0] == 1);
  CHECK(t.test.ClassCounts()[0] == 0);
}

TEST_CASE("explicit sizes and default split") {
  const Dataset d = TwoClass({10, 10});
  ResamplePlan plan;
  plan.resample_id = 3;
  plan.train_size = 6;
  plan.test_size = 4;
  const Split s = StratifiedResample(d, plan);
  CHECK(s.train.num_cases() == 6);
  CHECK(s.test.num_cases() == 4);

  plan.train_size = 25;
  CHECK(CodeOf([&] { StratifiedResample(d, plan); }) == ErrorCode::kQuotaExceeded);

  const Dataset a = TwoClass({3, 3});
  const Dataset b = TwoClass({2, 2});
  ResamplePlan zero;
  zero.resample_id = 0;
  const Split given = StratifiedResample(Concatenate(a, b), zero, std::make_pair(a, b));
  CHECK(given.train == a);
  CHECK(given.test == b);
  CHECK(Concatenate(a, b).num_cases() == 10);
}

TEST_CASE("property: resamples partition and stratify") {
  CounterRng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t c = 2 + rng.Below(4);
    std::vector<std::size_t> counts(c);
    for (auto& k : counts) k = 1 + rng.Below(40);
    const Dataset d = TwoClass(counts);
    ResamplePlan plan;
    plan.resample_id = rng.Next();
    plan.train_fraction = 0.2 + 0.6 * rng.Uniform();
    const Split s = StratifiedResample(d, plan);
    const std::size_t n = d.num_cases();

    std::vector<std::size_t> all = s.train_indices;
    all.insert(all.end(), s.test_indices.begin(), s.test_indices.end());
    std::sort(all.begin(), all.end());
    REQUIRE(all.size() == n);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(all[i] == i);

    const double train_n = static_cast<double>(s.train.num_cases());
    const auto tc = s.train.ClassCounts();
    for (std::size_t j = 0; j < c; ++j) {
      const double gap = std::abs(static_cast<double>(tc[j]) / train_n -
                                  static_cast<double>(counts[j]) / static_cast<double>(n));
      CHECK(gap <= 1.0 / train_n + 1.0 / static_cast<double>(n) + 1e-12);
      CHECK(tc[j] >= 1);
    }
    const Split again = StratifiedResample(d, plan);
    CHECK(again.train_indices == s.train_indices);
  }
}

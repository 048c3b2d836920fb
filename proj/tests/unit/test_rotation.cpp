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
#include <set>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "rotforge/dataset.hpp"
#include "rotforge/random.hpp"
#include "rotforge/rotation.hpp"
#include "rotforge/synthetic.hpp"

using namespace rotforge;

namespace {

double OrthonormalResidual(const Matrix& p) {
  double worst = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    for (std::size_t j = 0; j < p.rows(); ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < p.cols(); ++k) dot += p(i, k) * p(j, k);
      worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

// max |Sigma v_i - lambda_i v_i| over rows v_i of p.
double EigenResidual(const Matrix& sigma, const Matrix& p, const std::vector<double>& lambda) {
  double worst = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    for (std::size_t r = 0; r < sigma.rows(); ++r) {
      double acc = 0.0;
      for (std::size_t k = 0; k < sigma.cols(); ++k) acc += sigma(r, k) * p(i, k);
      worst = std::max(worst, std::abs(acc - lambda[i] * p(i, r)));
    }
  }
  return worst;
}

// Covariance written out independently of the library.
Matrix HandCovariance(const Matrix& x) {
  const std::size_t a = x.rows(), b = x.cols();
  std::vector<double> mean(b, 0.0);
  for (std::size_t r = 0; r < a; ++r) {
    for (std::size_t c = 0; c < b; ++c) mean[c] += x(r, c) / static_cast<double>(a);
  }
  Matrix cov(b, b);
  if (a < 2) return cov;
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < a; ++r) s += (x(r, i) - mean[i]) * (x(r, j) - mean[j]);
      cov(i, j) = s / static_cast<double>(a - 1);
    }
  }
  return cov;
}

}  // namespace

TEST_CASE("partition examples") {
  CounterRng rng(1);
  auto groups = PartitionFeatures({0, 1, 2, 3, 4, 5}, 3, rng);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].size() == 3);
  CHECK(groups[1].size() == 3);

  groups = PartitionFeatures({0, 1, 2, 3, 4, 5, 6}, 3, rng);
  REQUIRE(groups.size() == 3);
  CHECK(groups[0].size() == 3);
  CHECK(groups[1].size() == 3);
  CHECK(groups[2].size() == 1);

  CounterRng a(9), b(9);
  CHECK(PartitionFeatures({3, 5, 7, 11, 13}, 2, a) == PartitionFeatures({3, 5, 7, 11, 13}, 2, b));
}

TEST_CASE("property: partition covers the attributes") {
  CounterRng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 1 + rng.Below(40);
    const std::size_t f = 1 + rng.Below(12);
    std::vector<std::size_t> attrs(m);
    std::iota(attrs.begin(), attrs.end(), std::size_t{0});
    const auto groups = PartitionFeatures(attrs, f, rng);
    CHECK(groups.size() == (m + f - 1) / f);
    std::vector<std::size_t> all;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (g + 1 < groups.size()) CHECK(groups[g].size() == f);
      all.insert(all.end(), groups[g].begin(), groups[g].end());
    }
    std::sort(all.begin(), all.end());
    CHECK(all == attrs);
  }
}

TEST_CASE("case sampling") {
  std::vector<int> labels(20);
  for (int i = 0; i < 20; ++i) labels[i] = i < 10 ? 0 : 1;

  RotationConfig all;
  all.sample_proportion = 1.0;
  all.class_inclusion_prob = 1.0;
  CounterRng rng(3);
  auto rows = SampleGroupCases(labels, 2, all, rng);
  std::sort(rows.begin(), rows.end());
  CHECK(rows.size() == 20);
  CHECK(rows.back() == 19);

  RotationConfig half;
  int single = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    CounterRng r(seed);
    const auto pick = SampleGroupCases(labels, 2, half, r);
    std::set<int> classes;
    for (auto i : pick) classes.insert(labels[i]);
    CHECK(std::set<std::size_t>(pick.begin(), pick.end()).size() == pick.size());
    if (pick.size() == 5) {
      CHECK(classes.size() == 1);
      ++single;
    } else {
      CHECK(pick.size() == 10);
    }
    CounterRng again(seed);
    CHECK(SampleGroupCases(labels, 2, half, again) == pick);
  }
  // Each class alone is selected a quarter of the time, before redraws.
  CHECK(single > 80);
}

TEST_CASE("pca examples") {
  Matrix cross(4, 2);
  cross(0, 0) = 1;
  cross(1, 1) = 1;
  cross(2, 0) = -1;
  cross(3, 1) = -1;
  const PcaFit fit = PcaFitMatrix(cross);
  CHECK(fit.means == std::vector<double>{0.0, 0.0});
  CHECK(OrthonormalResidual(fit.projection) <= 1e-12);
  CHECK(fit.eigenvalues[0] == doctest::Approx(2.0 / 3.0));
  CHECK(fit.eigenvalues[1] == doctest::Approx(2.0 / 3.0));
  CHECK(EigenResidual(HandCovariance(cross), fit.projection, fit.eigenvalues) <= 1e-12);

  Matrix flat(5, 2);
  for (std::size_t r = 0; r < 5; ++r) {
    flat(r, 0) = static_cast<double>(r);
    flat(r, 1) = 4.0;
  }
  const PcaFit degenerate = PcaFitMatrix(flat);
  CHECK(degenerate.eigenvalues[1] == doctest::Approx(0.0));
  CHECK(OrthonormalResidual(degenerate.projection) <= 1e-12);

  Matrix scalar(3, 1);
  scalar(0, 0) = 1;
  scalar(1, 0) = 2;
  scalar(2, 0) = 6;
  const PcaFit one = PcaFitMatrix(scalar);
  CHECK(one.projection == Matrix::Identity(1));
  CHECK(one.means[0] == doctest::Approx(3.0));

  Matrix single(1, 3);
  single(0, 1) = 5;
  const PcaFit lone = PcaFitMatrix(single);
  CHECK(OrthonormalResidual(lone.projection) <= 1e-12);
}

TEST_CASE("sign convention") {
  CounterRng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix x(20, 4);
    for (auto& v : x.data()) v = rng.Gaussian();
    const PcaFit fit = PcaFitMatrix(x);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t k = 0; k < 4; ++k) {
        if (std::abs(fit.projection(i, k)) > 1e-12) {
          CHECK(fit.projection(i, k) > 0);
          break;
        }
      }
      if (i > 0) CHECK(fit.eigenvalues[i - 1] >= fit.eigenvalues[i]);
    }
  }
}

TEST_CASE("pca rejects non-finite input") {
  Matrix x(3, 2, 1.0);
  x(1, 1) = std::nan("");
  CHECK_THROWS_AS(PcaFitMatrix(x), Error);
}

TEST_CASE("apply rotation examples") {
  RotationSet rs;
  rs.input_size = 4;
  rs.source_attributes = {1, 3};
  rs.groups.push_back(FeatureGroup{{1, 3}, {0.0, 0.0}, Matrix::Identity(2), {1.0, 1.0}});
  const std::vector<double> x{9.0, 2.0, 8.0, -5.0};
  CHECK(ApplyRotation(rs, x) == std::vector<double>{2.0, -5.0});

  rs.groups[0].means = {2.0, -5.0};
  CHECK(ApplyRotation(rs, x) == std::vector<double>{0.0, 0.0});

  Matrix quarter(2, 2);
  quarter(0, 1) = 1.0;
  quarter(1, 0) = -1.0;
  RotationSet turn;
  turn.input_size = 2;
  turn.source_attributes = {0, 1};
  turn.groups.push_back(FeatureGroup{{0, 1}, {0.0, 0.0}, quarter, {1.0, 1.0}});
  const std::vector<double> e1{1.0, 0.0};
  CHECK(ApplyRotation(turn, e1) == std::vector<double>{0.0, -1.0});

  const std::vector<double> short_x{1.0};
  CHECK_THROWS_AS(ApplyRotation(turn, short_x), Error);
}

TEST_CASE("build rotation shapes and determinism") {
  ObliqueSpec spec;
  spec.cases = 90;
  spec.attributes = 6;
  spec.classes = 3;
  spec.seed = 5;
  const Dataset d = MakeObliqueDataset(spec);
  RotationConfig cfg;
  cfg.seed = 77;
  const RotationSet rs = BuildRotation(d, {}, cfg);
  REQUIRE(rs.groups.size() == 2);
  for (const auto& g : rs.groups) {
    CHECK(g.projection.rows() == 3);
    CHECK(g.projection.cols() == 3);
  }
  CHECK(rs.output_size() == 6);
  CHECK(BuildRotation(d, {}, cfg) == rs);
  CHECK(RotationSet::FromJson(rs.ToJson()) == rs);

  // No sampling: each group is the PCA of its full column block.
  RotationConfig full;
  full.sample_proportion = 1.0;
  full.class_inclusion_prob = 1.0;
  full.seed = 3;
  const RotationSet whole = BuildRotation(d, {}, full);
  for (const auto& g : whole.groups) {
    Matrix block(d.num_cases(), g.attributes.size());
    for (std::size_t r = 0; r < d.num_cases(); ++r) {
      for (std::size_t c = 0; c < g.attributes.size(); ++c) block(r, c) = d.values(r, g.attributes[c]);
    }
    // Rows arrive in draw order, so agreement is up to rounding.
    const PcaFit fit = PcaFitMatrix(block);
    for (std::size_t k = 0; k < fit.projection.data().size(); ++k) {
      CHECK(g.projection.data()[k] == doctest::Approx(fit.projection.data()[k]).epsilon(1e-9));
    }
    for (std::size_t k = 0; k < fit.means.size(); ++k) {
      CHECK(g.means[k] == doctest::Approx(fit.means[k]).epsilon(1e-12));
    }
  }

  const RotationSet single = BuildFullPca(d.values, {0, 2, 4});
  CHECK(single.groups.size() == 1);
  CHECK(single.output_size() == 3);
}

TEST_CASE("property: rotations are orthonormal eigenbases and isometries") {
  CounterRng rng(6);
  for (int trial = 0; trial < 40; ++trial) {
    ObliqueSpec spec;
    spec.cases = 30 + rng.Below(100);
    spec.attributes = 1 + rng.Below(20);
    spec.classes = 2 + rng.Below(3);
    spec.seed = rng.Next();
    const Dataset d = MakeObliqueDataset(spec);
    RotationConfig cfg;
    cfg.group_size = 1 + static_cast<int>(rng.Below(6));
    cfg.sample_proportion = 0.2 + 0.8 * rng.Uniform();
    cfg.seed = rng.Next();
    const RotationSet rs = BuildRotation(d, {}, cfg);

    std::vector<std::size_t> covered;
    for (const auto& g : rs.groups) {
      covered.insert(covered.end(), g.attributes.begin(), g.attributes.end());
      CHECK(OrthonormalResidual(g.projection) <= 1e-8);
    }
    std::sort(covered.begin(), covered.end());
    CHECK(covered == rs.source_attributes);

    std::vector<double> u(d.num_attributes()), v(d.num_attributes());
    for (std::size_t k = 0; k < u.size(); ++k) {
      u[k] = rng.Gaussian() * 3;
      v[k] = rng.Gaussian() * 3;
    }
    const auto ru = ApplyRotation(rs, u);
    const auto rv = ApplyRotation(rs, v);
    double before = 0.0, after = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      before += (u[k] - v[k]) * (u[k] - v[k]);
      after += (ru[k] - rv[k]) * (ru[k] - rv[k]);
    }
    CHECK(std::abs(std::sqrt(before) - std::sqrt(after)) <= 1e-8);
  }
}

TEST_CASE("property: jacobi against hand covariance") {
  CounterRng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t a = 1 + rng.Below(50);
    const std::size_t b = 1 + rng.Below(12);
    Matrix x(a, b);
    for (auto& v : x.data()) v = rng.Gaussian() * (1 + rng.Below(5));
    const PcaFit fit = PcaFitMatrix(x);
    CHECK(OrthonormalResidual(fit.projection) <= 1e-8);
    CHECK(EigenResidual(HandCovariance(x), fit.projection, fit.eigenvalues) <= 1e-6);
  }
}

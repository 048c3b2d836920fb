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

#include <boost/math/distributions/students_t.hpp>
#include <nlohmann/json.hpp>

#include "doctest.h"
#include "oracles.hpp"
#include "rotforge/random.hpp"
#include "rotforge/stats.hpp"
#include "test_util.hpp"

using namespace rotforge;

namespace {

// W+ and the mid-ranks of |d| for the nonzero differences.
std::pair<double, std::vector<double>> SignedRanks(const std::vector<double>& d) {
  std::vector<double> mags;
  for (double v : d) {
    if (v != 0.0) mags.push_back(std::abs(v));
  }
  std::vector<double> ranks;
  double w = 0.0;
  for (double v : d) {
    if (v == 0.0) continue;
    double below = 0, equal = 0;
    for (double u : mags) {
      below += u < std::abs(v);
      equal += u == std::abs(v);
    }
    const double r = below + (equal + 1) / 2;
    ranks.push_back(r);
    if (v > 0) w += r;
  }
  return {w, ranks};
}

ResultsMatrix Table(const std::vector<std::vector<double>>& rows) {
  ResultsMatrix r;
  const std::size_t k = rows[0].size();
  for (std::size_t j = 0; j < k; ++j) r.classifiers.push_back("c" + std::to_string(j));
  r.means = Matrix(rows.size(), k);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    r.datasets.push_back("d" + std::to_string(i));
    for (std::size_t j = 0; j < k; ++j) r.means(i, j) = rows[i][j];
  }
  return r;
}

std::set<std::vector<std::size_t>> CliqueOracle(const std::vector<double>& ranks,
                                                const std::vector<std::vector<bool>>& rejected) {
  const std::size_t k = ranks.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return ranks[a] < ranks[b]; });
  auto clean = [&](std::size_t s, std::size_t e) {
    for (std::size_t a = s; a <= e; ++a) {
      for (std::size_t b = a + 1; b <= e; ++b) {
        if (rejected[order[a]][order[b]]) return false;
      }
    }
    return true;
  };
  std::set<std::vector<std::size_t>> out;
  for (std::size_t s = 0; s < k; ++s) {
    for (std::size_t e = s; e < k; ++e) {
      if (!clean(s, e)) continue;
      const bool grow_left = s > 0 && clean(s - 1, e);
      const bool grow_right = e + 1 < k && clean(s, e + 1);
      if (!grow_left && !grow_right) {
        out.insert(std::vector<std::size_t>(order.begin() + s, order.begin() + e + 1));
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("wilcoxon examples") {
  const std::vector<double> x{1, 2, 3, 4, 5, 6};
  const TestResult same = WilcoxonSignedRank(x, x);
  CHECK(same.p_value == 1.0);
  CHECK(same.degenerate);

  const std::vector<double> y{0.5, 1.2, 2.0, 3.1, 4.05, 5.3};
  const TestResult pos = WilcoxonSignedRank(x, y);
  CHECK(pos.exact);
  CHECK(pos.n == 6);
  CHECK(pos.p_value == doctest::Approx(0.03125).epsilon(1e-12));

  const std::vector<double> a{1, -1, 2, -2, 3, -3, 4, -4};
  const std::vector<double> zero(8, 0.0);
  CHECK(WilcoxonSignedRank(a, zero).p_value == doctest::Approx(1.0));
}

TEST_CASE("property: exact wilcoxon equals sign enumeration") {
  CounterRng rng(1);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 1 + rng.Below(12);
    std::vector<double> x(n), y(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.Between(0, 6));
      y[i] = static_cast<double>(rng.Between(0, 6));
      d[i] = x[i] - y[i];
    }
    const auto [w, ranks] = SignedRanks(d);
    const TestResult got = WilcoxonSignedRank(x, y);
    if (ranks.empty()) {
      CHECK(got.p_value == 1.0);
      continue;
    }
    CHECK(got.statistic == doctest::Approx(w));
    CHECK(got.p_value == doctest::Approx(oracle::WilcoxonBySignPatterns(ranks, w)).epsilon(1e-12));
  }
}

TEST_CASE("property: normal approximation near the exact limit") {
  CounterRng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 21 + rng.Below(4);
    std::vector<double> x(n), y(n, 0.0);
    for (auto& v : x) v = rng.Gaussian() + 0.3;
    const TestResult approx = WilcoxonSignedRank(x, y);
    CHECK_FALSE(approx.exact);
    const auto [w, ranks] = SignedRanks(x);
    const double exact = trial < 3 && n == 21 ? oracle::WilcoxonBySignPatterns(ranks, w)
                                              : WilcoxonExactP(ranks, w);
    CHECK(std::abs(approx.p_value - exact) <= 0.02);
  }
}

TEST_CASE("property: wilcoxon invariances") {
  CounterRng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + rng.Below(30);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = std::round(rng.Gaussian() * 4);
      y[i] = std::round(rng.Gaussian() * 4);
    }
    const double p = WilcoxonSignedRank(x, y).p_value;
    auto xs = x, ys = y;
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] += 16;
      ys[i] += 16;
    }
    CHECK(WilcoxonSignedRank(xs, ys).p_value == doctest::Approx(p).epsilon(1e-12));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.Shuffle(perm);
    std::vector<double> xp(n), yp(n);
    for (std::size_t i = 0; i < n; ++i) {
      xp[i] = x[perm[i]];
      yp[i] = y[perm[i]];
    }
    CHECK(WilcoxonSignedRank(xp, yp).p_value == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("paired t") {
  const std::vector<double> x{1, 2, 3, 4};
  const TestResult same = PairedT(x, x);
  CHECK(same.degenerate);
  CHECK(same.p_value == 1.0);

  const std::vector<double> shifted{0, 1, 2, 3};
  const TestResult flat = PairedT(x, shifted);
  CHECK(flat.degenerate);
  CHECK(flat.p_value == 0.0);

  const std::vector<double> d{2, -1, 3, 0};
  const std::vector<double> z(4, 0.0);
  const TestResult r = PairedT(d, z);
  const double t = 1.0 / (std::sqrt(10.0 / 3.0) / 2.0);
  CHECK(r.statistic == doctest::Approx(t).epsilon(1e-12));
  const boost::math::students_t dist(3);
  CHECK(r.p_value == doctest::Approx(2 * boost::math::cdf(boost::math::complement(dist, t))).epsilon(1e-12));
}

TEST_CASE("friedman") {
  // Ranks per row: (1,2,3) (1,3,2) (3,1,2) (1,2,3); rank sums 6, 8, 10.
  // chi2 = 12*4/(3*4) * (1.5^2 + 2^2 + 2.5^2 - 3*4^2/4) = 2, p = exp(-1).
  const ResultsMatrix table = Table({{0.10, 0.20, 0.30},
                                     {0.15, 0.25, 0.20},
                                     {0.30, 0.10, 0.20},
                                     {0.05, 0.15, 0.25}});
  const FriedmanResult f = Friedman(table);
  CHECK(std::abs(f.statistic - 2.0) <= 1e-9);
  CHECK(std::abs(f.p_value - std::exp(-1.0)) <= 1e-9);
  CHECK(f.dof == 2);
  CHECK(f.mean_ranks == std::vector<double>{1.5, 2.0, 2.5});

  const FriedmanResult flat = Friedman(Table({{1, 1, 1}, {2, 2, 2}}));
  CHECK(flat.statistic == 0.0);
  CHECK(flat.p_value == doctest::Approx(1.0));
  CHECK(flat.mean_ranks == std::vector<double>{2.0, 2.0, 2.0});

  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 10; ++i) rows.push_back({0.1, 0.2 + i * 0.01, 0.3});
  CHECK(Friedman(Table(rows)).mean_ranks[0] == 1.0);

  ResultsMatrix auc = Table({{0.9, 0.8}, {0.7, 0.6}});
  auc.lower_is_better = false;
  CHECK(MeanRanks(auc) == std::vector<double>{1.0, 2.0});
}

TEST_CASE("property: rank sums") {
  CounterRng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.Below(8), n = 2 + rng.Below(20);
    std::vector<std::vector<double>> rows(n, std::vector<double>(k));
    for (auto& row : rows) {
      for (auto& v : row) v = static_cast<double>(rng.Below(4));
    }
    const auto ranks = MeanRanks(Table(rows));
    const double sum = std::accumulate(ranks.begin(), ranks.end(), 0.0);
    CHECK(std::abs(sum - static_cast<double>(k * (k + 1)) / 2) <= 1e-9);
  }
}

TEST_CASE("holm") {
  CHECK(HolmStepDown({0.001, 0.02, 0.03}, 0.05) == std::vector<bool>{true, true, true});
  CHECK(HolmStepDown({0.03, 0.001, 0.02}, 0.05) == std::vector<bool>{true, true, true});
  CHECK(HolmStepDown({0.001, 0.03, 0.04}, 0.05) == std::vector<bool>{true, false, false});
}

TEST_CASE("property: holm between bonferroni and uncorrected") {
  CounterRng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t m = 1 + rng.Below(15);
    std::vector<double> p(m);
    for (auto& v : p) v = std::pow(rng.Uniform(), 3);
    const auto holm = HolmStepDown(p, 0.05);
    for (std::size_t i = 0; i < m; ++i) {
      if (p[i] <= 0.05 / static_cast<double>(m)) CHECK(holm[i]);
      if (holm[i]) CHECK(p[i] <= 0.05);
    }
  }
}

TEST_CASE("cliques") {
  const std::vector<std::vector<bool>> none(2, std::vector<bool>(2, false));
  CHECK(FormCliques({1.5, 1.5}, none) == std::vector<std::vector<std::size_t>>{{0, 1}});

  std::vector<std::vector<bool>> dominated(3, std::vector<bool>(3, false));
  for (std::size_t j = 1; j < 3; ++j) dominated[0][j] = dominated[j][0] = true;
  CHECK(FormCliques({1.0, 2.4, 2.6}, dominated) ==
        std::vector<std::vector<std::size_t>>{{0}, {1, 2}});

  CounterRng rng(6);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + rng.Below(8);
    std::vector<double> ranks(k);
    for (auto& r : ranks) r = rng.Uniform() * k;
    std::vector<std::vector<bool>> rej(k, std::vector<bool>(k, false));
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) rej[a][b] = rej[b][a] = rng.Bernoulli(0.3);
    }
    const auto got = FormCliques(ranks, rej);
    CHECK(std::set<std::vector<std::size_t>>(got.begin(), got.end()) == CliqueOracle(ranks, rej));
    std::set<std::size_t> covered;
    for (const auto& c : got) covered.insert(c.begin(), c.end());
    CHECK(covered.size() == k);
  }
}

TEST_CASE("holm cliques and diagrams") {
  // Two identical classifiers: one clique, Friedman p 1.
  const ResultsMatrix twins = Table({{0.1, 0.1}, {0.2, 0.2}, {0.3, 0.3}});
  const CliqueReport r = HolmCliques(twins);
  CHECK(r.cliques.size() == 1);
  REQUIRE(r.friedman);
  CHECK(r.friedman->p_value == doctest::Approx(1.0));
  const std::string svg = RenderCdSvg(r);
  std::size_t bars = 0;
  for (std::size_t at = svg.find("class=\"clique\""); at != std::string::npos;
       at = svg.find("class=\"clique\"", at + 1)) {
    ++bars;
  }
  CHECK(bars == 1);

  // Seven classifiers: one clear winner, the rest indistinguishable.
  std::vector<std::vector<double>> rows;
  CounterRng rng(7);
  for (int i = 0; i < 25; ++i) {
    std::vector<double> row{0.01 * rng.Uniform()};
    for (int j = 1; j < 7; ++j) row.push_back(0.5 + 0.1 * rng.Uniform());
    rows.push_back(row);
  }
  const CliqueReport seven = HolmCliques(Table(rows));
  CHECK(seven.cliques.size() == 2);
  CHECK(seven.cliques[0] == std::vector<std::size_t>{0});
  testutil::TempDir dir("cd");
  WriteCdDiagram(seven, dir / "cd");
  const auto j = nlohmann::json::parse(testutil::ReadFile(dir / "cd.json"));
  CHECK(j.at("cliques") == nlohmann::json(seven.cliques));
  const std::string seven_svg = testutil::ReadFile(dir / "cd.svg");
  std::size_t seven_bars = 0;
  for (std::size_t at = seven_svg.find("class=\"clique\""); at != std::string::npos;
       at = seven_svg.find("class=\"clique\"", at + 1)) {
    ++seven_bars;
  }
  CHECK(seven_bars == 1);

  // Adding a second crowd that beats the first gives two bars.
  for (auto& row : rows) {
    for (int j = 4; j < 7; ++j) row[j] -= 0.3;
  }
  const CliqueReport split = HolmCliques(Table(rows));
  std::size_t multi = 0;
  for (const auto& c : split.cliques) multi += c.size() >= 2;
  CHECK(multi == 2);
}

TEST_CASE("results loading") {
  testutil::TempDir dir("results");
  const std::string header = "dataset,classifier,resample,error,balanced_error,auc,nll,build_seconds\n";
  std::string body;
  for (const char* d : {"a", "b", "c"}) {
    for (const char* c : {"x", "y"}) {
      for (int r = 0; r < 2; ++r) {
        body += std::string(d) + "," + c + "," + std::to_string(r) + "," +
                (c[0] == 'x' ? "0.1" : "0.2") + ",0,0.5,1,0\n";
      }
    }
  }
  testutil::WriteFile(dir / "all.csv", header + body);
  const ResultsMatrix r = LoadResults({dir / "all.csv"}, Metric::kError);
  CHECK(r.classifiers == std::vector<std::string>{"x", "y"});
  CHECK(r.datasets.size() == 3);
  CHECK(r.means(1, 1) == 0.2);
  CHECK(r.per_resample[0][0].size() == 2);
  CHECK(LoadResults({dir / "all.csv"}, Metric::kAuc).lower_is_better == false);

  testutil::WriteFile(dir / "bad.csv", "dataset,classifier,error\na,x,0.1\n");
  CHECK_THROWS_AS(LoadResults({dir / "bad.csv"}, Metric::kError), Error);
  testutil::WriteFile(dir / "hole.csv", header + "a,x,0,0.1,0,0,0,0\na,y,0,0.1,0,0,0,0\nb,x,0,0.1,0,0,0,0\n");
  CHECK_THROWS_AS(LoadResults({dir / "hole.csv"}, Metric::kError), Error);
}

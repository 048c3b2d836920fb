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

// Reference computations used by the tests. They are written for clarity and
// deliberately share no code with the library.

#ifndef ROTFORGE_TESTS_ORACLES_HPP
#define ROTFORGE_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <vector>

namespace oracle {

inline double Entropy(const std::vector<double>& counts) {
  double total = 0.0;
  for (double c : counts) total += c;
  double h = 0.0;
  for (double c : counts) {
    if (c > 0) h -= c / total * std::log2(c / total);
  }
  return h;
}

struct Split {
  double threshold;
  double score;
  double gain;
};

// Every midpoint between adjacent distinct values, scored directly from the
// left/right class counts. Highest score wins; scores within 1e-12 count as
// ties and keep the lower threshold.
inline std::optional<Split> BestSplit(const std::vector<double>& values,
                                      const std::vector<int>& labels, int classes,
                                      bool gain_ratio) {
  std::set<double> distinct(values.begin(), values.end());
  std::vector<double> sorted(distinct.begin(), distinct.end());
  std::vector<double> all(classes, 0.0);
  for (int y : labels) all[y] += 1;
  const double n = static_cast<double>(values.size());
  const double parent = Entropy(all);
  std::optional<Split> best;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    const double t = (sorted[i] + sorted[i + 1]) / 2.0;
    std::vector<double> left(classes, 0.0), right(classes, 0.0);
    for (std::size_t k = 0; k < values.size(); ++k) {
      (values[k] <= t ? left : right)[labels[k]] += 1;
    }
    double nl = 0, nr = 0;
    for (int j = 0; j < classes; ++j) {
      nl += left[j];
      nr += right[j];
    }
    const double gain = parent - nl / n * Entropy(left) - nr / n * Entropy(right);
    if (gain <= 1e-12) continue;
    double score = gain;
    if (gain_ratio) score = gain / Entropy({nl, nr});
    if (!best || score > best->score + 1e-12) best = Split{t, score, gain};
  }
  return best;
}

// Two-sided signed-rank p by listing all 2^n sign assignments.
inline double WilcoxonBySignPatterns(const std::vector<double>& ranks, double w_plus) {
  const std::size_t n = ranks.size();
  const std::uint64_t patterns = std::uint64_t{1} << n;
  std::uint64_t le = 0, ge = 0;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) w += ranks[i];
    }
    if (w <= w_plus + 1e-9) ++le;
    if (w >= w_plus - 1e-9) ++ge;
  }
  const double p = 2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(patterns);
  return std::min(p, 1.0);
}

// Largest x in [lo, hi] with f(x) <= target, for nondecreasing f.
inline double Bisect(const std::function<double(double)>& f, double target, double lo, double hi) {
  if (f(lo) > target) return lo;
  if (f(hi) <= target) return hi;
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) <= target ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace oracle

#endif  // ROTFORGE_TESTS_ORACLES_HPP

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

#include "rotforge/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rotforge/random.hpp"

namespace rotforge {

Dataset MakeObliqueDataset(const ObliqueSpec& spec) {
  if (spec.cases < 2 * spec.classes || spec.attributes < 1 || spec.classes < 2) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic spec too small");
  }
  const std::size_t n = spec.cases;
  const std::size_t m = spec.attributes;
  const std::size_t d =
      spec.latent_dim > 0 ? spec.latent_dim : std::min<std::size_t>((m + 2) / 3, 50);
  CounterRng rng(spec.seed);

  Matrix mixing(d, m);
  for (double& v : mixing.data()) v = rng.Gaussian();
  std::vector<double> direction(m);
  for (double& v : direction) v = rng.Gaussian();

  Dataset data;
  data.name = "oblique_s" + std::to_string(spec.seed);
  data.provenance = "synthetic oblique generator";
  for (std::size_t a = 0; a < m; ++a) data.feature_names.push_back("x" + std::to_string(a));
  for (std::size_t j = 0; j < spec.classes; ++j) data.class_names.push_back("c" + std::to_string(j));
  data.values = Matrix(n, m);

  std::vector<double> latent(d);
  std::vector<double> score(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& z : latent) z = rng.Gaussian();
    auto row = data.values.row(i);
    for (std::size_t a = 0; a < m; ++a) {
      double v = 0.0;
      for (std::size_t k = 0; k < d; ++k) v += latent[k] * mixing(k, a);
      row[a] = v + spec.noise * rng.Gaussian();
      score[i] += direction[a] * row[a];
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
  data.labels.assign(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    data.labels[order[r]] = static_cast<int>(r * spec.classes / n);
  }
  if (spec.label_noise > 0.0) {
    for (auto& y : data.labels) {
      if (rng.Bernoulli(spec.label_noise)) y = static_cast<int>(rng.Below(spec.classes));
    }
  }
  return data;
}

}  // namespace rotforge

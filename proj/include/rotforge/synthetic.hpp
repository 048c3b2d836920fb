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

#ifndef ROTFORGE_SYNTHETIC_HPP
#define ROTFORGE_SYNTHETIC_HPP

#include <cstddef>
#include <cstdint>

#include "rotforge/dataset.hpp"

namespace rotforge {

// Correlated Gaussian features x = zA + noise, with z drawn from a
// latent_dim-dimensional standard normal, and classes cut at quantiles of a
// random dense projection of x. Class boundaries are therefore oblique
// hyperplanes in a correlated feature space. Classes are balanced.
struct ObliqueSpec {
  std::size_t cases = 400;
  std::size_t attributes = 20;
  std::size_t classes = 2;
  std::size_t latent_dim = 0;  // 0: min(ceil(m/3), 50)
  double noise = 0.3;
  double label_noise = 0.0;    // probability of a uniformly relabelled case
  std::uint64_t seed = 0;
};

Dataset MakeObliqueDataset(const ObliqueSpec& spec);

}  // namespace rotforge

#endif  // ROTFORGE_SYNTHETIC_HPP

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

// Time-contracted rotation forest. When the predicted build time exceeds the
// budget, trees are grown on random attribute subsets (m >= n) or stratified
// case subsamples (m < n) whose size is capped so that e_min trees fit; the
// cap is refreshed from observed tree times by an exponentially weighted
// moving average.

#ifndef ROTFORGE_CONTRACT_HPP
#define ROTFORGE_CONTRACT_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rotforge/forest.hpp"
#include "rotforge/timing.hpp"

namespace rotforge {

struct Dataset;

struct ContractConfig {
  double budget_seconds = 0.0;
  int e_min = 50;
  int e_max = 200;
  double alpha = 0.1;
  std::uint64_t memory_limit_bytes = std::uint64_t{10} << 30;
  TimingModel timing = TimingModel::Published();
  double interval_alpha = 0.05;

  void Validate() const;
};

enum class ReductionAxis { kNone, kAttributes, kCases };
const char* ReductionAxisName(ReductionAxis axis);

struct ContractLogEntry {
  std::size_t index = 0;
  int phase = 0;               // 1 or 2
  std::size_t subsample = 0;   // attributes or cases given to the tree
  std::size_t cap = 0;         // cap in force when the tree was drawn
  double seconds = 0.0;
  double t_hat = 0.0;          // after the update that followed the tree
  double elapsed = 0.0;
};

enum class ContractStop { kDelegated, kEnsembleFull, kBudget, kMemory };
const char* ContractStopName(ContractStop stop);

struct ContractResult {
  ForestModel model;
  ReductionAxis axis = ReductionAxis::kNone;
  ContractStop stop = ContractStop::kDelegated;
  double initial_t_hat = 0.0;  // seconds for e_min full-size trees
  std::vector<ContractLogEntry> log;

  bool delegated() const { return stop == ContractStop::kDelegated; }
};

// t_hat <- (1 - alpha) t_hat + alpha b.
inline double EwmaUpdate(double t_hat, double observation, double alpha) {
  return (1.0 - alpha) * t_hat + alpha * observation;
}

// Upper prediction bound (seconds) for a full build of forest_cfg.trees trees.
// Falls back to the point prediction when the model carries no design inverse.
double EstimateTimeUpperBound(const TimingModel& timing, std::size_t n, std::size_t m,
                              int trees, double interval_alpha);

// Serial by construction: forest_cfg.num_threads is ignored. forest_cfg.trees
// sizes the delegated full build only; the reduced regime builds between 1 and
// e_max trees.
ContractResult ContractTrain(const Dataset& train, const ContractConfig& contract,
                             ForestConfig forest_cfg);

}  // namespace rotforge

#endif  // ROTFORGE_CONTRACT_HPP

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

#include "rotforge/contract.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "rotforge/dataset.hpp"
#include "rotforge/random.hpp"

namespace rotforge {
namespace {

using Clock = std::chrono::steady_clock;

// Subsample sizes are drawn from their own stream, away from the tree indices.
constexpr std::uint64_t kContractStreamIndex = ~std::uint64_t{0};

double SecondsSince(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

void ContractConfig::Validate() const {
  if (!(budget_seconds > 0.0)) throw Error(ErrorCode::kInvalidArgument, "budget must be positive");
  if (e_min < 1 || e_max < e_min) {
    throw Error(ErrorCode::kInvalidArgument, "need 1 <= e_min <= e_max");
  }
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in [0, 1)");
  }
  if (memory_limit_bytes == 0) throw Error(ErrorCode::kInvalidArgument, "memory limit must be positive");
  if (!(interval_alpha > 0.0 && interval_alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "interval alpha must lie in (0, 1)");
  }
  if (!(timing.calibration_scale > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "calibration scale must be positive");
  }
}

const char* ReductionAxisName(ReductionAxis axis) {
  switch (axis) {
    case ReductionAxis::kNone: return "none";
    case ReductionAxis::kAttributes: return "attributes";
    case ReductionAxis::kCases: return "cases";
  }
  return "?";
}

const char* ContractStopName(ContractStop stop) {
  switch (stop) {
    case ContractStop::kDelegated: return "delegated";
    case ContractStop::kEnsembleFull: return "ensemble_full";
    case ContractStop::kBudget: return "budget";
    case ContractStop::kMemory: return "memory";
  }
  return "?";
}

double EstimateTimeUpperBound(const TimingModel& timing, std::size_t n, std::size_t m, int trees,
                              double interval_alpha) {
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  const double full = timing.fitted() ? timing.UpperBoundSeconds(dn, dm, interval_alpha)
                                      : timing.PredictSeconds(dn, dm);
  return std::max(full, 0.0) * static_cast<double>(trees) / kReferenceTrees;
}

ContractResult ContractTrain(const Dataset& train, const ContractConfig& contract,
                             ForestConfig forest_cfg) {
  contract.Validate();
  train.Validate(false);
  forest_cfg.base = BaseLearner::kC45;
  forest_cfg.transform = Transform::kPca;
  forest_cfg.num_threads = 1;

  const auto start = Clock::now();
  const std::size_t n = train.num_cases();
  const std::size_t m = train.num_attributes();
  const std::size_t c = train.num_classes();
  ContractResult result;

  const double full_bound =
      EstimateTimeUpperBound(contract.timing, n, m, forest_cfg.trees, contract.interval_alpha);
  if (full_bound < contract.budget_seconds) {
    result.model = BuildRotationForest(train, forest_cfg);
    result.initial_t_hat = full_bound;
    result.stop = ContractStop::kDelegated;
    return result;
  }

  // Prose rule: shrink the larger dimension.
  result.axis = m >= n ? ReductionAxis::kAttributes : ReductionAxis::kCases;
  const bool by_attributes = result.axis == ReductionAxis::kAttributes;
  const std::size_t full = by_attributes ? m : n;
  const std::size_t floor_size =
      by_attributes ? std::min<std::size_t>(std::max(forest_cfg.rotation.group_size, 1), m)
                    : std::min<std::size_t>(2 * c, n);
  const TimingModel& tm = contract.timing;
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  const double full_prediction = tm.Predict(dn, dm);

  // Predicted cost of a tree of size k relative to a full-size tree.
  auto ratio = [&](std::size_t k) {
    const double kk = static_cast<double>(k);
    const double part = by_attributes ? tm.Predict(dn, kk) : tm.Predict(kk, dm);
    if (!(full_prediction > 0.0) || !(part > 0.0)) return 1.0;
    return std::min(part / full_prediction, 1.0);
  };
  auto cap_for = [&](double t_hat) {
    return by_attributes
               ? EstimateMaxAttributes(m, n, contract.e_min, t_hat, contract.budget_seconds, tm,
                                       floor_size)
               : EstimateMaxCases(n, m, contract.e_min, t_hat, contract.budget_seconds, tm, c);
  };

  double t_hat = EstimateTimeUpperBound(tm, n, m, contract.e_min, contract.interval_alpha);
  result.initial_t_hat = t_hat;
  std::size_t cap = cap_for(t_hat);

  ForestModel& model = result.model;
  model.config = forest_cfg;
  model.class_names = train.class_names;
  model.num_attributes = m;
  CounterRng rng(DeriveSeed(forest_cfg.seed, kContractStreamIndex));
  const auto e_min = static_cast<std::size_t>(contract.e_min);
  const auto e_max = static_cast<std::size_t>(contract.e_max);

  result.stop = ContractStop::kEnsembleFull;
  for (std::size_t i = 0; i < e_max; ++i) {
    const int phase = i < e_min ? 1 : 2;
    const std::size_t lo = phase == 1 ? std::max(cap / 2, floor_size) : cap;
    const std::size_t hi = phase == 1 ? cap : full;
    const auto k = static_cast<std::size_t>(
        rng.Between(static_cast<std::int64_t>(std::min(lo, hi)), static_cast<std::int64_t>(hi)));

    const double elapsed = SecondsSince(start);
    if (i > 0) {
      const double projected = t_hat / static_cast<double>(contract.e_min) * ratio(k);
      if (elapsed + projected > contract.budget_seconds) {
        result.stop = ContractStop::kBudget;
        break;
      }
    }

    MemberLimits limits;
    if (by_attributes) limits.max_attributes = k;
    else limits.max_cases = k;
    const auto t0 = Clock::now();
    model.members.push_back(BuildMember(train, forest_cfg, i, limits));
    const double seconds = SecondsSince(t0);
    model.per_tree_seconds.push_back(seconds);

    // Observed tree time, rescaled to a full-size tree and to e_min trees.
    const double b = seconds / ratio(k) * static_cast<double>(contract.e_min);
    t_hat = EwmaUpdate(t_hat, b, contract.alpha);
    const std::size_t drawn_cap = cap;
    if (phase == 1) cap = cap_for(t_hat);

    result.log.push_back({i, phase, k, drawn_cap, seconds, t_hat, SecondsSince(start)});
    if (model.EstimatedBytes() > contract.memory_limit_bytes) {
      result.stop = ContractStop::kMemory;
      break;
    }
  }
  model.config.trees = static_cast<int>(model.members.size());
  model.build_seconds = SecondsSince(start);
  return result;
}

}  // namespace rotforge

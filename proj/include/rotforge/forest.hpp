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

// Tree ensembles built from two factors: the base learner (C4.5 or random
// tree) and the per-tree data transformation (bagging, bagging followed by a
// full PCA, or the grouped rotation). Rotation forest is (C4.5, PCA); random
// forest is (RandomTree, BAG).
//
// Tree i draws all of its randomness from DeriveSeed(seed, i), so a forest of
// k trees is exactly the first k members of a larger forest with the same
// seed, and trees may be built in any order or concurrently.

#ifndef ROTFORGE_FOREST_HPP
#define ROTFORGE_FOREST_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rotforge/rotation.hpp"
#include "rotforge/tree.hpp"

namespace rotforge {

struct Dataset;

enum class BaseLearner { kRandomTree, kC45 };
enum class Transform { kBag, kBagPca, kPca };

const char* BaseLearnerName(BaseLearner base);
const char* TransformName(Transform transform);
BaseLearner ParseBaseLearner(const std::string& name);
Transform ParseTransform(const std::string& name);

struct ForestConfig {
  int trees = 200;
  BaseLearner base = BaseLearner::kC45;
  Transform transform = Transform::kPca;
  RotationConfig rotation;  // seed field ignored; derived per tree
  double bag_fraction = 1.0;
  std::optional<int> max_attributes_per_tree;
  int min_cases = 2;
  int random_subspace_size = 0;  // 0: ceil(sqrt(m))
  int max_depth = 0;
  bool prune = false;
  std::uint64_t seed = 0;
  // Not part of the model; results do not depend on it.
  int num_threads = 1;

  // Fixed defaults used for the headline comparison: rotation forest with
  // k=200, f=3, p=0.5 and random forest with 500 trees and sqrt(m) subspace.
  static ForestConfig RotationForestDefaults();
  static ForestConfig RandomForestDefaults();

  nlohmann::json ToJson() const;
  static ForestConfig FromJson(const nlohmann::json& j);
};

struct ForestMember {
  std::vector<std::size_t> attributes;  // ascending subset of the input space
  std::optional<RotationSet> rotation;
  DecisionTree tree;

  bool operator==(const ForestMember&) const = default;
};

// Restrictions applied to a single tree by the contract trainer.
struct MemberLimits {
  std::optional<std::size_t> max_attributes;
  std::optional<std::size_t> max_cases;
};

class ForestModel {
 public:
  ForestConfig config;
  std::vector<std::string> class_names;
  std::size_t num_attributes = 0;
  std::vector<ForestMember> members;
  double build_seconds = 0.0;
  std::vector<double> per_tree_seconds;

  std::size_t num_classes() const { return class_names.size(); }

  // Mean of the member leaf distributions.
  std::vector<double> Predict(std::span<const double> x) const;
  // Predict of the first k members for each k in sizes, in one pass.
  std::vector<std::vector<double>> PredictPrefixes(std::span<const double> x,
                                                   const std::vector<std::size_t>& sizes) const;
  // Argmax with ties to the lowest class index.
  static int ArgMax(std::span<const double> distribution);

  // First k members only.
  ForestModel Truncated(std::size_t k) const;

  std::size_t EstimatedBytes() const;

  nlohmann::json ToJson() const;
  static ForestModel FromJson(const nlohmann::json& j);
  void Save(const std::filesystem::path& path) const;
  static ForestModel Load(const std::filesystem::path& path);
};

inline constexpr int kModelFormatVersion = 1;

// Builds tree `index` of the forest described by config.
ForestMember BuildMember(const Dataset& train, const ForestConfig& config, std::size_t index,
                         const MemberLimits& limits = {});

// Generic builder driven entirely by config.base / config.transform.
ForestModel BuildForest(const Dataset& train, const ForestConfig& config);

ForestModel BuildRotationForest(const Dataset& train, ForestConfig config);
ForestModel BuildRandomForest(const Dataset& train, ForestConfig config);
ForestModel BuildHybrid(const Dataset& train, BaseLearner base, Transform transform,
                        ForestConfig config);
ForestModel BuildRandomAttributeRotationForest(const Dataset& train, int max_attributes,
                                               ForestConfig config);

// The bootstrap row indices tree `index` would use (for inspection/tests).
std::vector<std::size_t> BootstrapRows(std::size_t n, const ForestConfig& config,
                                       std::size_t index);

}  // namespace rotforge

#endif  // ROTFORGE_FOREST_HPP

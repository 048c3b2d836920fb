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

// Base learners: a C4.5-style gain-ratio tree and a random-subspace tree.
//
// Both grow binary trees over numeric attributes with tests `x[a] <= t`,
// where t is the midpoint between adjacent distinct training values. Leaves
// store the raw relative class frequencies of the training cases that reach
// them.

#ifndef ROTFORGE_TREE_HPP
#define ROTFORGE_TREE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rotforge/common.hpp"

namespace rotforge {

struct Dataset;

enum class TreeKind { kC45, kRandomTree };
enum class SplitCriterion { kGain, kGainRatio };

// Gains at or below this are treated as zero.
inline constexpr double kGainEpsilon = 1e-12;

struct TreeConfig {
  TreeKind kind = TreeKind::kC45;
  int min_cases = 2;
  // RandomTree only; 0 selects ceil(sqrt(m)).
  int random_subspace_size = 0;
  // 0 means unlimited.
  int max_depth = 0;
  // Pessimistic-error subtree replacement (C4.5 style), off by default.
  bool prune = false;
  double prune_confidence = 0.25;
  std::uint64_t seed = 0;
};

struct TreeNode {
  int attribute = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> distribution;  // leaves only
  std::size_t support = 0;

  bool is_leaf() const { return attribute < 0; }
  bool operator==(const TreeNode&) const = default;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(std::vector<TreeNode> nodes, std::size_t num_attributes,
               std::size_t num_classes);

  std::span<const double> Predict(std::span<const double> instance) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t num_attributes() const { return num_attributes_; }
  std::size_t num_classes() const { return num_classes_; }
  std::size_t num_leaves() const;
  std::size_t depth() const;

  // Rough serialized payload, used for memory accounting.
  std::size_t EstimatedBytes() const;

  nlohmann::json ToJson() const;
  static DecisionTree FromJson(const nlohmann::json& j);

  bool operator==(const DecisionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;  // preorder, root at 0
  std::size_t num_attributes_ = 0;
  std::size_t num_classes_ = 0;
};

// Shannon entropy in bits. Throws on all-zero counts.
double Entropy(std::span<const std::size_t> counts);

struct NumericSplit {
  double threshold = 0.0;
  double score = 0.0;  // gain or gain ratio, per criterion
  double gain = 0.0;
  std::size_t left_count = 0;
};

// Best `x <= t` split over all midpoints of adjacent distinct values. Ties go
// to the lowest threshold. Returns nullopt when values are all identical or
// no admissible split has positive gain. Children must each hold at least
// min_leaf cases.
std::optional<NumericSplit> BestNumericSplit(std::span<const double> values,
                                             std::span<const int> labels,
                                             std::size_t num_classes,
                                             SplitCriterion criterion,
                                             std::size_t min_leaf = 1);

DecisionTree BuildTree(const Matrix& x, std::span<const int> labels,
                       std::size_t num_classes, const TreeConfig& config);
DecisionTree BuildTree(const Dataset& train, const TreeConfig& config);

// C4.5's upper confidence bound on extra errors for a leaf with N cases and
// e errors.
double PessimisticExtraErrors(double n, double e, double confidence);

}  // namespace rotforge

#endif  // ROTFORGE_TREE_HPP

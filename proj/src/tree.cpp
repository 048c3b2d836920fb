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

#include "rotforge/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <nlohmann/json.hpp>

#include "rotforge/dataset.hpp"
#include "rotforge/random.hpp"

namespace rotforge {
namespace {

double EntropyOf(const std::vector<std::size_t>& counts, std::size_t total) {
  if (total == 0) return 0.0;
  double h = 0.0;
  const double n = static_cast<double>(total);
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

double SplitInfo(std::size_t left, std::size_t right) {
  const double n = static_cast<double>(left + right);
  double h = 0.0;
  for (std::size_t part : {left, right}) {
    if (part == 0) continue;
    const double p = static_cast<double>(part) / n;
    h -= p * std::log2(p);
  }
  return h;
}

double Midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  // Adjacent doubles: the midpoint can round up to hi.
  return mid < hi ? mid : lo;
}

struct SortedColumn {
  std::vector<std::pair<double, int>> entries;
};

// Sweeps a value-sorted (value, label) list and returns the best split.
std::optional<NumericSplit> SweepSorted(const std::vector<std::pair<double, int>>& sorted,
                                        std::size_t num_classes, SplitCriterion criterion,
                                        std::size_t min_leaf) {
  const std::size_t n = sorted.size();
  if (n < 2) return std::nullopt;
  std::vector<std::size_t> total(num_classes, 0);
  for (const auto& [v, y] : sorted) ++total[y];
  const double parent = EntropyOf(total, n);

  std::vector<std::size_t> left(num_classes, 0);
  std::vector<std::size_t> right = total;
  std::optional<NumericSplit> best;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const int y = sorted[i].second;
    ++left[y];
    --right[y];
    if (!(sorted[i].first < sorted[i + 1].first)) continue;
    const std::size_t n_left = i + 1;
    const std::size_t n_right = n - n_left;
    if (n_left < min_leaf || n_right < min_leaf) continue;
    const double weighted = (static_cast<double>(n_left) * EntropyOf(left, n_left) +
                             static_cast<double>(n_right) * EntropyOf(right, n_right)) /
                            static_cast<double>(n);
    const double gain = parent - weighted;
    if (gain <= kGainEpsilon) continue;
    double score = gain;
    if (criterion == SplitCriterion::kGainRatio) score = gain / SplitInfo(n_left, n_right);
    if (!best || score > best->score + kGainEpsilon) {
      best = NumericSplit{Midpoint(sorted[i].first, sorted[i + 1].first), score, gain, n_left};
    }
  }
  return best;
}

struct NodeChoice {
  int attribute = -1;
  NumericSplit split;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> labels, std::size_t num_classes,
              const TreeConfig& config)
      : x_(x), labels_(labels), num_classes_(num_classes), config_(config), rng_(config.seed) {
    const std::size_t m = x.cols();
    subspace_ = config.random_subspace_size > 0
                    ? std::min<std::size_t>(config.random_subspace_size, m)
                    : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m))));
    subspace_ = std::max<std::size_t>(subspace_, 1);
    min_cases_ = static_cast<std::size_t>(std::max(config.min_cases, 1));
  }

  DecisionTree Build() {
    std::vector<std::uint32_t> cases(x_.rows());
    std::iota(cases.begin(), cases.end(), 0u);
    Grow(cases, 0);
    if (config_.prune) Prune(0);
    if (config_.prune) Compact();
    return DecisionTree(std::move(nodes_), x_.cols(), num_classes_);
  }

 private:
  std::vector<std::size_t> Counts(const std::vector<std::uint32_t>& cases) const {
    std::vector<std::size_t> counts(num_classes_, 0);
    for (auto i : cases) ++counts[labels_[i]];
    return counts;
  }

  int MakeLeaf(const std::vector<std::size_t>& counts, std::size_t support) {
    TreeNode leaf;
    leaf.support = support;
    leaf.distribution.assign(num_classes_, 0.0);
    if (support > 0) {
      for (std::size_t j = 0; j < num_classes_; ++j) {
        leaf.distribution[j] = static_cast<double>(counts[j]) / static_cast<double>(support);
      }
    } else {
      std::fill(leaf.distribution.begin(), leaf.distribution.end(),
                1.0 / static_cast<double>(num_classes_));
    }
    nodes_.push_back(std::move(leaf));
    return static_cast<int>(nodes_.size() - 1);
  }

  std::optional<NumericSplit> EvaluateAttribute(const std::vector<std::uint32_t>& cases, int a,
                                                SplitCriterion criterion) {
    auto& sorted = scratch_;
    sorted.clear();
    sorted.reserve(cases.size());
    for (auto i : cases) sorted.emplace_back(x_(i, a), labels_[i]);
    std::sort(sorted.begin(), sorted.end());
    return SweepSorted(sorted, num_classes_, criterion, min_cases_);
  }

  std::optional<NodeChoice> ChooseC45(const std::vector<std::uint32_t>& cases) {
    std::vector<NodeChoice> candidates;
    for (std::size_t a = 0; a < x_.cols(); ++a) {
      // Per-attribute threshold maximizes gain; attributes then compete on
      // gain ratio among those with at least average gain.
      if (auto split = EvaluateAttribute(cases, static_cast<int>(a), SplitCriterion::kGain)) {
        candidates.push_back({static_cast<int>(a), *split});
      }
    }
    if (candidates.empty()) return std::nullopt;
    double mean_gain = 0.0;
    for (const auto& c : candidates) mean_gain += c.split.gain;
    mean_gain /= static_cast<double>(candidates.size());
    std::optional<NodeChoice> best;
    double best_ratio = 0.0;
    for (const auto& c : candidates) {
      if (c.split.gain < mean_gain - kGainEpsilon) continue;
      const double ratio = c.split.gain / SplitInfo(c.split.left_count,
                                                    cases.size() - c.split.left_count);
      if (!best || ratio > best_ratio + kGainEpsilon) {
        best = c;
        best_ratio = ratio;
      }
    }
    best->split.score = best_ratio;
    return best;
  }

  std::optional<NodeChoice> ChooseRandom(const std::vector<std::uint32_t>& cases) {
    std::vector<int> order(x_.cols());
    std::iota(order.begin(), order.end(), 0);
    rng_.Shuffle(order);
    std::optional<NodeChoice> best;
    // Like Weka's RandomTree: keep drawing attributes past the subspace size
    // until one yields a positive-gain split.
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (k >= subspace_ && best) break;
      const int a = order[k];
      if (auto split = EvaluateAttribute(cases, a, SplitCriterion::kGain)) {
        const bool better = !best || split->score > best->split.score + kGainEpsilon ||
                            (std::abs(split->score - best->split.score) <= kGainEpsilon &&
                             a < best->attribute);
        if (better) best = NodeChoice{a, *split};
      }
    }
    return best;
  }

  int Grow(const std::vector<std::uint32_t>& cases, int depth) {
    const auto counts = Counts(cases);
    const std::size_t present =
        std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; });
    const bool depth_capped = config_.max_depth > 0 && depth >= config_.max_depth;
    if (present <= 1 || cases.size() < 2 * min_cases_ || depth_capped) {
      return MakeLeaf(counts, cases.size());
    }
    const auto choice =
        config_.kind == TreeKind::kC45 ? ChooseC45(cases) : ChooseRandom(cases);
    if (!choice) return MakeLeaf(counts, cases.size());

    std::vector<std::uint32_t> left_cases;
    std::vector<std::uint32_t> right_cases;
    for (auto i : cases) {
      (x_(i, choice->attribute) <= choice->split.threshold ? left_cases : right_cases)
          .push_back(i);
    }
    const int index = static_cast<int>(nodes_.size());
    TreeNode node;
    node.attribute = choice->attribute;
    node.threshold = choice->split.threshold;
    node.support = cases.size();
    // Kept for pruning; cleared from internal nodes afterwards.
    node.distribution.assign(counts.begin(), counts.end());
    nodes_.push_back(std::move(node));
    const int left = Grow(left_cases, depth + 1);
    const int right = Grow(right_cases, depth + 1);
    nodes_[index].left = left;
    nodes_[index].right = right;
    nodes_[index].distribution.clear();
    return index;
  }

  // Returns (estimated errors, class counts) of the subtree rooted at index,
  // collapsing it to a leaf when that does not raise the estimate.
  std::pair<double, std::vector<double>> Prune(int index) {
    TreeNode& node = nodes_[index];
    const double cf = config_.prune_confidence;
    if (node.is_leaf()) {
      std::vector<double> counts(num_classes_);
      for (std::size_t j = 0; j < num_classes_; ++j) {
        counts[j] = node.distribution[j] * static_cast<double>(node.support);
      }
      const double n = static_cast<double>(node.support);
      const double errors = n - *std::max_element(counts.begin(), counts.end());
      return {errors + PessimisticExtraErrors(n, errors, cf), counts};
    }
    auto [left_est, left_counts] = Prune(node.left);
    auto [right_est, right_counts] = Prune(nodes_[index].right);
    std::vector<double> counts(num_classes_);
    for (std::size_t j = 0; j < num_classes_; ++j) counts[j] = left_counts[j] + right_counts[j];
    const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
    const double errors = n - *std::max_element(counts.begin(), counts.end());
    const double leaf_est = errors + PessimisticExtraErrors(n, errors, cf);
    const double subtree_est = left_est + right_est;
    if (leaf_est <= subtree_est + 0.1) {
      TreeNode& self = nodes_[index];
      self.attribute = -1;
      self.left = self.right = -1;
      self.distribution.assign(num_classes_, 0.0);
      for (std::size_t j = 0; j < num_classes_; ++j) self.distribution[j] = counts[j] / n;
      return {leaf_est, counts};
    }
    return {subtree_est, counts};
  }

  // Drops nodes orphaned by pruning and restores preorder numbering.
  void Compact() {
    std::vector<TreeNode> out;
    out.reserve(nodes_.size());
    auto copy = [&](auto&& self, int index) -> int {
      const int mine = static_cast<int>(out.size());
      out.push_back(nodes_[index]);
      if (!nodes_[index].is_leaf()) {
        const int l = self(self, nodes_[index].left);
        const int r = self(self, nodes_[index].right);
        out[mine].left = l;
        out[mine].right = r;
      }
      return mine;
    };
    copy(copy, 0);
    nodes_ = std::move(out);
  }

  const Matrix& x_;
  std::span<const int> labels_;
  std::size_t num_classes_;
  TreeConfig config_;
  CounterRng rng_;
  std::size_t subspace_ = 1;
  std::size_t min_cases_ = 2;
  std::vector<TreeNode> nodes_;
  std::vector<std::pair<double, int>> scratch_;
};

}  // namespace

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::size_t num_attributes,
                           std::size_t num_classes)
    : nodes_(std::move(nodes)), num_attributes_(num_attributes), num_classes_(num_classes) {}

std::span<const double> DecisionTree::Predict(std::span<const double> instance) const {
  if (instance.size() != num_attributes_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "instance has " + std::to_string(instance.size()) + " values, tree expects " +
                    std::to_string(num_attributes_));
  }
  if (nodes_.empty()) throw Error(ErrorCode::kUnfitted, "empty tree");
  std::size_t index = 0;
  while (!nodes_[index].is_leaf()) {
    const TreeNode& node = nodes_[index];
    index = static_cast<std::size_t>(instance[node.attribute] <= node.threshold ? node.left
                                                                                : node.right);
  }
  return nodes_[index].distribution;
}

std::size_t DecisionTree::num_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes_[i].is_leaf()) {
      level[nodes_[i].left] = level[i] + 1;
      level[nodes_[i].right] = level[i] + 1;
    }
  }
  return deepest;
}

std::size_t DecisionTree::EstimatedBytes() const {
  std::size_t bytes = sizeof(*this);
  for (const auto& node : nodes_) {
    bytes += sizeof(TreeNode) + node.distribution.size() * sizeof(double);
  }
  return bytes;
}

nlohmann::json DecisionTree::ToJson() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& node : nodes_) {
    if (node.is_leaf()) {
      nodes.push_back({{"distribution", node.distribution}, {"support", node.support}});
    } else {
      nodes.push_back({{"attribute", node.attribute},
                       {"threshold", node.threshold},
                       {"left", node.left},
                       {"right", node.right},
                       {"support", node.support}});
    }
  }
  return {{"num_attributes", num_attributes_}, {"num_classes", num_classes_}, {"nodes", nodes}};
}

DecisionTree DecisionTree::FromJson(const nlohmann::json& j) {
  std::vector<TreeNode> nodes;
  for (const auto& item : j.at("nodes")) {
    TreeNode node;
    node.support = item.value("support", std::size_t{0});
    if (item.contains("attribute")) {
      node.attribute = item.at("attribute").get<int>();
      node.threshold = item.at("threshold").get<double>();
      node.left = item.at("left").get<int>();
      node.right = item.at("right").get<int>();
    } else {
      node.distribution = item.at("distribution").get<std::vector<double>>();
    }
    nodes.push_back(std::move(node));
  }
  const auto m = j.at("num_attributes").get<std::size_t>();
  const auto c = j.at("num_classes").get<std::size_t>();
  for (const auto& node : nodes) {
    const bool bad_child = !node.is_leaf() &&
                           (node.left <= 0 || node.right <= 0 ||
                            static_cast<std::size_t>(node.left) >= nodes.size() ||
                            static_cast<std::size_t>(node.right) >= nodes.size() ||
                            static_cast<std::size_t>(node.attribute) >= m);
    if (bad_child || (node.is_leaf() && node.distribution.size() != c)) {
      throw Error(ErrorCode::kParse, "malformed tree node");
    }
  }
  return DecisionTree(std::move(nodes), m, c);
}

double Entropy(std::span<const std::size_t> counts) {
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (total == 0) throw Error(ErrorCode::kInvalidArgument, "entropy of all-zero counts");
  return EntropyOf(std::vector<std::size_t>(counts.begin(), counts.end()), total);
}

std::optional<NumericSplit> BestNumericSplit(std::span<const double> values,
                                             std::span<const int> labels,
                                             std::size_t num_classes, SplitCriterion criterion,
                                             std::size_t min_leaf) {
  if (values.size() != labels.size() || values.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "values and labels must have equal length >= 2");
  }
  std::vector<std::pair<double, int>> sorted;
  sorted.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_classes) {
      throw Error(ErrorCode::kInvalidArgument, "label out of range");
    }
    sorted.emplace_back(values[i], labels[i]);
  }
  std::sort(sorted.begin(), sorted.end());
  return SweepSorted(sorted, num_classes, criterion, std::max<std::size_t>(min_leaf, 1));
}

DecisionTree BuildTree(const Matrix& x, std::span<const int> labels, std::size_t num_classes,
                       const TreeConfig& config) {
  if (x.rows() != labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "rows and labels differ in length");
  }
  if (x.rows() == 0 || x.cols() == 0 || num_classes == 0) {
    throw Error(ErrorCode::kInvalidArgument, "cannot build a tree on empty data");
  }
  return TreeBuilder(x, labels, num_classes, config).Build();
}

DecisionTree BuildTree(const Dataset& train, const TreeConfig& config) {
  return BuildTree(train.values, train.labels, train.num_classes(), config);
}

double PessimisticExtraErrors(double n, double e, double confidence) {
  if (n <= 0.0) return 0.0;
  if (e < 1.0) {
    const double base = n * (1.0 - std::pow(confidence, 1.0 / n));
    if (e == 0.0) return base;
    return base + e * (PessimisticExtraErrors(n, 1.0, confidence) - base);
  }
  if (e + 0.5 >= n) return std::max(n - e, 0.0);
  const double z =
      boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - confidence);
  const double f = (e + 0.5) / n;
  const double r = (f + z * z / (2.0 * n) +
                    z * std::sqrt(f / n - f * f / n + z * z / (4.0 * n * n))) /
                   (1.0 + z * z / n);
  return r * n - e;
}

}  // namespace rotforge

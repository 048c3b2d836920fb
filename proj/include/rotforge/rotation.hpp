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

// Per-tree sparse rotation: the attributes are split into random groups, a
// PCA is fitted per group on a class- and case-subsample of the training set,
// and the resulting block-diagonal transform is applied to every case.

#ifndef ROTFORGE_ROTATION_HPP
#define ROTFORGE_ROTATION_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rotforge/common.hpp"

namespace rotforge {

struct Dataset;
class CounterRng;

struct FeatureGroup {
  std::vector<std::size_t> attributes;  // indices into the original space
  std::vector<double> means;
  Matrix projection;  // rows are principal components, descending variance
  std::vector<double> eigenvalues;

  bool operator==(const FeatureGroup&) const = default;
};

struct RotationSet {
  std::vector<FeatureGroup> groups;
  std::vector<std::size_t> source_attributes;  // ascending
  std::size_t input_size = 0;                  // m of the original space

  std::size_t output_size() const { return source_attributes.size(); }
  std::size_t EstimatedBytes() const;

  nlohmann::json ToJson() const;
  static RotationSet FromJson(const nlohmann::json& j);

  bool operator==(const RotationSet&) const = default;
};

struct RotationConfig {
  int group_size = 3;               // f
  double sample_proportion = 0.5;   // p
  double class_inclusion_prob = 0.5;
  std::uint64_t seed = 0;
};

// Bounded redraws of the class subset before falling back to all classes.
inline constexpr int kMaxClassRedraws = 50;

struct EigenDecomposition {
  std::vector<double> values;  // descending
  Matrix vectors;              // row i pairs with values[i]
  int sweeps = 0;
};

// Cyclic Jacobi for a small dense symmetric matrix. Rows of the returned
// vectors are sign-fixed so the first entry above 1e-12 in magnitude is
// positive.
EigenDecomposition JacobiEigen(const Matrix& symmetric, double tolerance = 1e-12,
                               int max_sweeps = 100);

// Sample covariance with divisor a-1 (zero matrix when a == 1).
Matrix Covariance(const Matrix& subset, std::vector<double>* means = nullptr);

struct PcaFit {
  std::vector<double> means;
  Matrix projection;
  std::vector<double> eigenvalues;
};

PcaFit PcaFitMatrix(const Matrix& subset);

std::vector<std::vector<std::size_t>> PartitionFeatures(std::vector<std::size_t> attributes,
                                                        std::size_t group_size, CounterRng& rng);

// Class subset by Bernoulli draws, then ceil(p * pooled count) cases without
// replacement from the selected classes. Returned indices are in draw order.
std::vector<std::size_t> SampleGroupCases(std::span<const int> labels, std::size_t num_classes,
                                          const RotationConfig& config, CounterRng& rng);

// Builds the rotation over `attributes` (all attributes when empty).
RotationSet BuildRotation(const Matrix& x, std::span<const int> labels, std::size_t num_classes,
                          const std::vector<std::size_t>& attributes,
                          const RotationConfig& config);
RotationSet BuildRotation(const Dataset& train, const std::vector<std::size_t>& attributes,
                          const RotationConfig& config);

// One group over all of `attributes`, fitted on every row of x.
RotationSet BuildFullPca(const Matrix& x, const std::vector<std::size_t>& attributes);

// Writes the rotated image of a full-length instance into out
// (out.size() == rs.output_size()).
void ApplyRotation(const RotationSet& rs, std::span<const double> x, std::span<double> out);
std::vector<double> ApplyRotation(const RotationSet& rs, std::span<const double> x);
Matrix ApplyRotation(const RotationSet& rs, const Matrix& x);

}  // namespace rotforge

#endif  // ROTFORGE_ROTATION_HPP

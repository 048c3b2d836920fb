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

#ifndef ROTFORGE_DATASET_HPP
#define ROTFORGE_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rotforge/common.hpp"

namespace rotforge {

// Real-valued feature matrix plus categorical labels. Immutable by convention
// once validated; every consumer takes it by const reference.
struct Dataset {
  std::string name;
  std::vector<std::string> feature_names;
  Matrix values;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::string provenance;

  std::size_t num_cases() const { return values.rows(); }
  std::size_t num_attributes() const { return values.cols(); }
  std::size_t num_classes() const { return class_names.size(); }

  std::vector<std::size_t> ClassCounts() const;

  // Rows in the given order; duplicates allowed (bootstrap samples).
  Dataset Subset(const std::vector<std::size_t>& rows) const;

  // Checks finiteness, c >= 2, n >= 2, m >= 1 and label range. When
  // require_all_classes is set every class must occur at least once.
  void Validate(bool require_all_classes = true) const;

  bool operator==(const Dataset&) const = default;
};

Dataset LoadArff(const std::filesystem::path& path);
void SaveArff(const Dataset& data, const std::filesystem::path& path);

struct CsvOptions {
  bool has_header = true;
  // Negative values count from the end (-1 is the last column).
  int class_column = -1;
  char delimiter = ',';
};
Dataset LoadCsv(const std::filesystem::path& path, const CsvOptions& options = {});

// Dispatches on extension: ".arff" or anything else as CSV with defaults.
Dataset LoadDataset(const std::filesystem::path& path);

struct ResamplePlan {
  std::uint64_t resample_id = 0;
  double train_fraction = 0.5;
  // Explicit per-split sizes override train_fraction when set.
  std::optional<std::size_t> train_size;
  std::optional<std::size_t> test_size;
};

struct Split {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

// Seats per class: floor(count * target / total) then one leftover seat per
// class in descending fractional-remainder order (ties to lowest class),
// each quota clamped to >= 1 for non-empty classes.
std::vector<std::size_t> StratifiedQuotas(const std::vector<std::size_t>& class_counts,
                                          std::size_t target);

// Deterministic stratified split seeded by resample_id alone. When a default
// split is supplied and resample_id is 0 it is returned unchanged.
Split StratifiedResample(const Dataset& data, const ResamplePlan& plan,
                         const std::optional<std::pair<Dataset, Dataset>>& default_split =
                             std::nullopt);

// Concatenates a provided train/test pair (same schema) into one dataset so
// later resamples draw from the pooled cases.
Dataset Concatenate(const Dataset& first, const Dataset& second);

}  // namespace rotforge

#endif  // ROTFORGE_DATASET_HPP

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

#include "rotforge/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "rotforge/random.hpp"
#include "text_util.hpp"

namespace rotforge {
namespace {

using internal::ParseDouble;
using internal::SplitRecord;
using internal::ToLower;
using internal::Trim;

std::ifstream OpenForRead(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kNotFound, "dataset not found: " + path.string());
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return in;
}

std::string ParseError(const std::filesystem::path& path, std::size_t line,
                       const std::string& what) {
  return path.string() + ":" + std::to_string(line) + ": " + what;
}

// Reads a possibly quoted token from the front of `rest`, advancing it.
std::string TakeName(std::string_view& rest) {
  rest = Trim(rest);
  if (rest.empty()) return {};
  if (rest.front() == '\'' || rest.front() == '"') {
    const char quote = rest.front();
    const std::size_t close = rest.find(quote, 1);
    if (close == std::string_view::npos) return {};
    std::string name(rest.substr(1, close - 1));
    rest.remove_prefix(close + 1);
    return name;
  }
  std::size_t end = 0;
  while (end < rest.size() && !std::isspace(static_cast<unsigned char>(rest[end])) &&
         rest[end] != '{') {
    ++end;
  }
  std::string name(rest.substr(0, end));
  rest.remove_prefix(end);
  return name;
}

struct ArffAttribute {
  std::string name;
  bool nominal = false;
  std::vector<std::string> values;
};

}  // namespace

std::vector<std::size_t> Dataset::ClassCounts() const {
  std::vector<std::size_t> counts(num_classes(), 0);
  for (int label : labels) {
    if (label >= 0 && static_cast<std::size_t>(label) < counts.size()) ++counts[label];
  }
  return counts;
}

Dataset Dataset::Subset(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.name = name;
  out.feature_names = feature_names;
  out.class_names = class_names;
  out.provenance = provenance;
  out.values = Matrix(rows.size(), num_attributes());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = values.row(rows[i]);
    std::copy(src.begin(), src.end(), out.values.row(i).begin());
    out.labels.push_back(labels[rows[i]]);
  }
  return out;
}

void Dataset::Validate(bool require_all_classes) const {
  if (num_attributes() < 1) throw Error(ErrorCode::kInvalidArgument, "dataset has no attributes");
  if (num_cases() < 2) throw Error(ErrorCode::kInvalidArgument, "dataset needs at least 2 cases");
  if (num_classes() < 2) throw Error(ErrorCode::kSingleClass, "dataset needs at least 2 classes");
  if (labels.size() != num_cases()) {
    throw Error(ErrorCode::kDimensionMismatch, "label count does not match case count");
  }
  if (!feature_names.empty() && feature_names.size() != num_attributes()) {
    throw Error(ErrorCode::kDimensionMismatch, "feature name count does not match attributes");
  }
  for (double v : values.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNumeric, "non-finite feature value");
  }
  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes()) {
      throw Error(ErrorCode::kInvalidArgument, "class index out of range");
    }
  }
  if (require_all_classes) {
    const auto counts = ClassCounts();
    for (std::size_t j = 0; j < counts.size(); ++j) {
      if (counts[j] == 0) {
        throw Error(ErrorCode::kInvalidArgument, "class '" + class_names[j] + "' has no cases");
      }
    }
  }
}

Dataset LoadArff(const std::filesystem::path& path) {
  std::ifstream in = OpenForRead(path);
  Dataset data;
  data.name = path.stem().string();
  data.provenance = path.string() + " (arff)";
  std::vector<ArffAttribute> attributes;
  std::vector<double> cells;
  std::string line;
  std::size_t line_no = 0;
  bool in_data = false;
  std::map<std::string, int> class_index;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = Trim(line);
    if (view.empty() || view.front() == '%') continue;
    if (!in_data) {
      if (view.front() != '@') {
        throw Error(ErrorCode::kParse, ParseError(path, line_no, "expected a header directive"));
      }
      std::string_view rest = view;
      const std::string keyword = ToLower(TakeName(rest));
      if (keyword == "@relation") {
        const std::string rel = TakeName(rest);
        if (!rel.empty()) data.name = rel;
      } else if (keyword == "@attribute") {
        ArffAttribute attribute;
        attribute.name = TakeName(rest);
        rest = Trim(rest);
        if (attribute.name.empty() || rest.empty()) {
          throw Error(ErrorCode::kParse, ParseError(path, line_no, "malformed @attribute"));
        }
        if (rest.front() == '{') {
          const std::size_t close = rest.rfind('}');
          if (close == std::string_view::npos) {
            throw Error(ErrorCode::kParse, ParseError(path, line_no, "unterminated nominal list"));
          }
          attribute.nominal = true;
          attribute.values = SplitRecord(rest.substr(1, close - 1), ',', true);
        } else {
          const std::string type = ToLower(TakeName(rest));
          if (type != "numeric" && type != "real" && type != "integer") {
            throw Error(ErrorCode::kUnsupportedAttribute,
                        ParseError(path, line_no,
                                   "attribute '" + attribute.name + "' has unsupported type " + type));
          }
        }
        attributes.push_back(std::move(attribute));
      } else if (keyword == "@data") {
        if (attributes.size() < 2) {
          throw Error(ErrorCode::kParse,
                      ParseError(path, line_no, "need numeric attributes plus a class"));
        }
        for (std::size_t a = 0; a + 1 < attributes.size(); ++a) {
          if (attributes[a].nominal) {
            throw Error(ErrorCode::kUnsupportedAttribute,
                        path.string() + ": nominal non-class attribute '" +
                            attributes[a].name + "'");
          }
          data.feature_names.push_back(attributes[a].name);
        }
        if (!attributes.back().nominal) {
          throw Error(ErrorCode::kUnsupportedAttribute,
                      path.string() + ": last attribute must be the nominal class");
        }
        data.class_names = attributes.back().values;
        for (std::size_t j = 0; j < data.class_names.size(); ++j) {
          class_index[data.class_names[j]] = static_cast<int>(j);
        }
        in_data = true;
      } else {
        throw Error(ErrorCode::kParse, ParseError(path, line_no, "unknown directive " + keyword));
      }
      continue;
    }
    if (view.front() == '{') {
      throw Error(ErrorCode::kParse, ParseError(path, line_no, "sparse rows are not supported"));
    }
    const auto fields = SplitRecord(view, ',', true);
    if (fields.size() != attributes.size()) {
      throw Error(ErrorCode::kParse, ParseError(path, line_no, "wrong number of values"));
    }
    for (std::size_t a = 0; a + 1 < fields.size(); ++a) {
      if (fields[a] == "?") {
        throw Error(ErrorCode::kMissingValue, ParseError(path, line_no, "missing value '?'"));
      }
      const auto value = ParseDouble(fields[a]);
      if (!value) {
        throw Error(ErrorCode::kParse,
                    ParseError(path, line_no, "non-numeric value '" + fields[a] + "'"));
      }
      cells.push_back(*value);
    }
    const std::string& label = fields.back();
    if (label == "?") {
      throw Error(ErrorCode::kMissingValue, ParseError(path, line_no, "missing class value"));
    }
    const auto it = class_index.find(label);
    if (it == class_index.end()) {
      throw Error(ErrorCode::kParse, ParseError(path, line_no, "undeclared class '" + label + "'"));
    }
    data.labels.push_back(it->second);
  }
  if (!in_data) throw Error(ErrorCode::kParse, path.string() + ": missing @data section");
  const std::size_t m = data.feature_names.size();
  data.values = Matrix(data.labels.size(), m);
  data.values.data() = std::move(cells);
  data.Validate(false);
  return data;
}

void SaveArff(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  auto quote = [](const std::string& s) {
    if (s.find_first_of(" \t,{}'\"%") == std::string::npos && !s.empty()) return s;
    std::string q = "'";
    for (char ch : s) {
      if (ch == '\'') q += "''";
      else q.push_back(ch);
    }
    return q + "'";
  };
  out << "@relation " << quote(data.name) << "\n\n";
  for (const auto& name : data.feature_names) out << "@attribute " << quote(name) << " numeric\n";
  out << "@attribute class {";
  for (std::size_t j = 0; j < data.class_names.size(); ++j) {
    out << (j ? "," : "") << quote(data.class_names[j]);
  }
  out << "}\n\n@data\n";
  for (std::size_t i = 0; i < data.num_cases(); ++i) {
    for (double v : data.values.row(i)) out << internal::FormatDouble(v) << ',';
    out << quote(data.class_names[data.labels[i]]) << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

Dataset LoadCsv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in = OpenForRead(path);
  Dataset data;
  data.name = path.stem().string();
  data.provenance = path.string() + " (csv)";
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header;
  std::string line;
  std::size_t width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    auto fields = SplitRecord(line, options.delimiter);
    if (first) {
      width = fields.size();
      first = false;
      if (options.has_header) {
        header = std::move(fields);
        continue;
      }
    }
    if (fields.size() != width) {
      throw Error(ErrorCode::kRaggedRows, path.string() + ": row " +
                                              std::to_string(rows.size() + 1) + " has " +
                                              std::to_string(fields.size()) + " fields, expected " +
                                              std::to_string(width));
    }
    rows.push_back(std::move(fields));
  }
  if (width < 2) throw Error(ErrorCode::kParse, path.string() + ": need at least two columns");
  const int w = static_cast<int>(width);
  const int class_col = options.class_column < 0 ? w + options.class_column : options.class_column;
  if (class_col < 0 || class_col >= w) {
    throw Error(ErrorCode::kInvalidArgument, "class column out of range");
  }
  std::set<std::string> distinct;
  for (const auto& row : rows) distinct.insert(row[class_col]);
  if (distinct.size() < 2) {
    throw Error(ErrorCode::kSingleClass, path.string() + ": class column has fewer than 2 values");
  }
  data.class_names.assign(distinct.begin(), distinct.end());
  std::map<std::string, int> class_index;
  for (std::size_t j = 0; j < data.class_names.size(); ++j) {
    class_index[data.class_names[j]] = static_cast<int>(j);
  }
  for (int c = 0; c < w; ++c) {
    if (c == class_col) continue;
    data.feature_names.push_back(header.empty() ? "att" + std::to_string(data.feature_names.size())
                                                : header[c]);
  }
  data.values = Matrix(rows.size(), width - 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::size_t out_col = 0;
    for (int c = 0; c < w; ++c) {
      if (c == class_col) continue;
      const auto value = ParseDouble(rows[i][c]);
      if (!value) {
        const bool missing = rows[i][c].empty() || rows[i][c] == "?";
        throw Error(missing ? ErrorCode::kMissingValue : ErrorCode::kNonNumeric,
                    path.string() + ": row " + std::to_string(i + 1) + ": non-numeric cell '" +
                        rows[i][c] + "'");
      }
      data.values(i, out_col++) = *value;
    }
    data.labels.push_back(class_index.at(rows[i][class_col]));
  }
  data.Validate();
  return data;
}

Dataset LoadDataset(const std::filesystem::path& path) {
  if (ToLower(path.extension().string()) == ".arff") return LoadArff(path);
  return LoadCsv(path);
}

std::vector<std::size_t> StratifiedQuotas(const std::vector<std::size_t>& class_counts,
                                          std::size_t target) {
  const std::size_t total = std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0});
  std::vector<std::size_t> quotas(class_counts.size(), 0);
  if (total == 0) return quotas;
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t j = 0; j < class_counts.size(); ++j) {
    const double exact = static_cast<double>(class_counts[j]) * static_cast<double>(target) /
                         static_cast<double>(total);
    quotas[j] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    assigned += quotas[j];
    remainders.emplace_back(exact - static_cast<double>(quotas[j]), j);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first + 1e-12; });
  for (std::size_t r = 0; r < remainders.size() && assigned < target; ++r) {
    const std::size_t j = remainders[r].second;
    if (quotas[j] < class_counts[j]) {
      ++quotas[j];
      ++assigned;
    }
  }
  for (std::size_t j = 0; j < quotas.size(); ++j) {
    if (class_counts[j] > 0 && quotas[j] == 0) quotas[j] = 1;
  }
  return quotas;
}

Split StratifiedResample(const Dataset& data, const ResamplePlan& plan,
                         const std::optional<std::pair<Dataset, Dataset>>& default_split) {
  if (plan.resample_id == 0 && default_split) {
    Split split{default_split->first, default_split->second, {}, {}};
    const std::size_t n_train = split.train.num_cases();
    split.train_indices.resize(n_train);
    std::iota(split.train_indices.begin(), split.train_indices.end(), std::size_t{0});
    split.test_indices.resize(split.test.num_cases());
    std::iota(split.test_indices.begin(), split.test_indices.end(), n_train);
    return split;
  }
  const std::size_t n = data.num_cases();
  std::size_t train_target = 0;
  if (plan.train_size) {
    if (*plan.train_size > n) {
      throw Error(ErrorCode::kQuotaExceeded, "train size exceeds number of cases");
    }
    train_target = *plan.train_size;
  } else {
    if (!(plan.train_fraction > 0.0 && plan.train_fraction < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "train fraction must lie in (0,1)");
    }
    train_target = static_cast<std::size_t>(std::llround(static_cast<double>(n) * plan.train_fraction));
  }

  const auto counts = data.ClassCounts();
  std::vector<std::vector<std::size_t>> by_class(counts.size());
  for (std::size_t i = 0; i < n; ++i) by_class[data.labels[i]].push_back(i);

  const auto train_quota = StratifiedQuotas(counts, train_target);
  std::vector<std::size_t> remaining(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (train_quota[j] > counts[j]) {
      throw Error(ErrorCode::kQuotaExceeded,
                  "train quota exceeds size of class '" + data.class_names[j] + "'");
    }
    remaining[j] = counts[j] - train_quota[j];
  }
  std::vector<std::size_t> test_quota = remaining;
  if (plan.test_size) {
    const std::size_t left = std::accumulate(remaining.begin(), remaining.end(), std::size_t{0});
    if (*plan.test_size > left) {
      throw Error(ErrorCode::kQuotaExceeded, "test size exceeds cases left after training split");
    }
    if (*plan.test_size < left) {
      test_quota = StratifiedQuotas(remaining, *plan.test_size);
      for (std::size_t j = 0; j < test_quota.size(); ++j) {
        test_quota[j] = std::min(test_quota[j], remaining[j]);
      }
    }
  }

  CounterRng rng(plan.resample_id);
  Split split;
  for (std::size_t j = 0; j < by_class.size(); ++j) {
    rng.Shuffle(by_class[j]);
    const auto& idx = by_class[j];
    split.train_indices.insert(split.train_indices.end(), idx.begin(), idx.begin() + train_quota[j]);
    split.test_indices.insert(split.test_indices.end(), idx.begin() + train_quota[j],
                              idx.begin() + train_quota[j] + test_quota[j]);
  }
  std::sort(split.train_indices.begin(), split.train_indices.end());
  std::sort(split.test_indices.begin(), split.test_indices.end());
  split.train = data.Subset(split.train_indices);
  split.test = data.Subset(split.test_indices);
  return split;
}

Dataset Concatenate(const Dataset& first, const Dataset& second) {
  if (first.num_attributes() != second.num_attributes() ||
      first.class_names != second.class_names) {
    throw Error(ErrorCode::kSchemaMismatch, "train and test files have different schemas");
  }
  Dataset out = first;
  out.values = Matrix(first.num_cases() + second.num_cases(), first.num_attributes());
  auto& cells = out.values.data();
  std::copy(first.values.data().begin(), first.values.data().end(), cells.begin());
  std::copy(second.values.data().begin(), second.values.data().end(),
            cells.begin() + static_cast<std::ptrdiff_t>(first.values.data().size()));
  out.labels.insert(out.labels.end(), second.labels.begin(), second.labels.end());
  return out;
}

}  // namespace rotforge

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

#include "rotforge/forest.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include <nlohmann/json.hpp>

#include "rotforge/dataset.hpp"
#include "rotforge/random.hpp"

namespace rotforge {
namespace {

// Purpose tags for the per-tree streams.
enum Stream : std::uint64_t {
  kAttributeStream = 1,
  kBagStream = 2,
  kRotationStream = 3,
  kTreeStream = 4,
  kCaseStream = 5,
};

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::size_t> SelectAttributes(std::size_t m, std::optional<std::size_t> cap,
                                          std::uint64_t seed) {
  std::vector<std::size_t> attrs;
  if (cap && *cap < m) {
    CounterRng rng(seed);
    attrs = rng.SampleWithoutReplacement(m, std::max<std::size_t>(*cap, 1));
    std::sort(attrs.begin(), attrs.end());
  } else {
    attrs.resize(m);
    std::iota(attrs.begin(), attrs.end(), std::size_t{0});
  }
  return attrs;
}

std::vector<std::size_t> SelectCases(const Dataset& train, std::optional<std::size_t> cap,
                                     std::uint64_t seed) {
  const std::size_t n = train.num_cases();
  std::vector<std::size_t> rows;
  if (!cap || *cap >= n) {
    rows.resize(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
  }
  const auto counts = train.ClassCounts();
  const auto quotas = StratifiedQuotas(counts, *cap);
  std::vector<std::vector<std::size_t>> by_class(counts.size());
  for (std::size_t i = 0; i < n; ++i) by_class[train.labels[i]].push_back(i);
  CounterRng rng(seed);
  for (std::size_t j = 0; j < by_class.size(); ++j) {
    rng.Shuffle(by_class[j]);
    const std::size_t take = std::min(quotas[j], by_class[j].size());
    rows.insert(rows.end(), by_class[j].begin(), by_class[j].begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

std::vector<std::size_t> Bootstrap(std::size_t n, double fraction, std::uint64_t seed) {
  CounterRng rng(seed);
  const auto draws = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(fraction * static_cast<double>(n))));
  std::vector<std::size_t> rows(draws);
  for (auto& r : rows) r = static_cast<std::size_t>(rng.Below(n));
  return rows;
}

Matrix Gather(const Matrix& x, const std::vector<std::size_t>& rows,
              const std::vector<std::size_t>* cols) {
  const std::size_t width = cols ? cols->size() : x.cols();
  Matrix out(rows.size(), width);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = x.row(rows[r]);
    auto dst = out.row(r);
    if (cols) {
      for (std::size_t c = 0; c < width; ++c) dst[c] = src[(*cols)[c]];
    } else {
      std::copy(src.begin(), src.end(), dst.begin());
    }
  }
  return out;
}

bool IsIdentitySubset(const std::vector<std::size_t>& attrs, std::size_t m) {
  if (attrs.size() != m) return false;
  for (std::size_t i = 0; i < m; ++i) {
    if (attrs[i] != i) return false;
  }
  return true;
}

void ValidateConfig(const ForestConfig& config, std::size_t m) {
  if (config.trees < 1) throw Error(ErrorCode::kInvalidArgument, "number of trees must be >= 1");
  if (config.max_attributes_per_tree &&
      (*config.max_attributes_per_tree < 1)) {
    throw Error(ErrorCode::kInvalidArgument, "max attributes per tree must be >= 1");
  }
  if (config.rotation.group_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "attributes per group must be >= 1");
  }
  if (!(config.rotation.sample_proportion > 0.0 && config.rotation.sample_proportion <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sampling proportion must lie in (0,1]");
  }
  if (!(config.bag_fraction > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "bag fraction must be positive");
  }
  if (config.min_cases < 1) throw Error(ErrorCode::kInvalidArgument, "min cases must be >= 1");
  (void)m;
}

}  // namespace

const char* BaseLearnerName(BaseLearner base) {
  return base == BaseLearner::kC45 ? "c45" : "rt";
}

const char* TransformName(Transform transform) {
  switch (transform) {
    case Transform::kBag: return "bag";
    case Transform::kBagPca: return "bag_pca";
    case Transform::kPca: return "pca";
  }
  return "?";
}

BaseLearner ParseBaseLearner(const std::string& name) {
  if (name == "c45" || name == "C45" || name == "c4.5" || name == "C4.5") return BaseLearner::kC45;
  if (name == "rt" || name == "RT" || name == "randomtree") return BaseLearner::kRandomTree;
  throw Error(ErrorCode::kInvalidArgument, "unknown base learner '" + name + "'");
}

Transform ParseTransform(const std::string& name) {
  if (name == "bag" || name == "BAG") return Transform::kBag;
  if (name == "bag_pca" || name == "BAG_PCA" || name == "bag+pca" || name == "BAG+PCA") {
    return Transform::kBagPca;
  }
  if (name == "pca" || name == "PCA") return Transform::kPca;
  throw Error(ErrorCode::kInvalidArgument, "unknown transform '" + name + "'");
}

ForestConfig ForestConfig::RotationForestDefaults() {
  ForestConfig c;
  c.trees = 200;
  c.base = BaseLearner::kC45;
  c.transform = Transform::kPca;
  c.rotation.group_size = 3;
  c.rotation.sample_proportion = 0.5;
  return c;
}

ForestConfig ForestConfig::RandomForestDefaults() {
  ForestConfig c;
  c.trees = 500;
  c.base = BaseLearner::kRandomTree;
  c.transform = Transform::kBag;
  c.random_subspace_size = 0;
  return c;
}

nlohmann::json ForestConfig::ToJson() const {
  nlohmann::json j = {{"trees", trees},
                      {"base", BaseLearnerName(base)},
                      {"transform", TransformName(transform)},
                      {"group_size", rotation.group_size},
                      {"sample_proportion", rotation.sample_proportion},
                      {"class_inclusion_prob", rotation.class_inclusion_prob},
                      {"bag_fraction", bag_fraction},
                      {"min_cases", min_cases},
                      {"random_subspace_size", random_subspace_size},
                      {"max_depth", max_depth},
                      {"prune", prune},
                      {"seed", seed}};
  j["max_attributes_per_tree"] =
      max_attributes_per_tree ? nlohmann::json(*max_attributes_per_tree) : nlohmann::json(nullptr);
  return j;
}

ForestConfig ForestConfig::FromJson(const nlohmann::json& j) {
  ForestConfig c;
  c.trees = j.at("trees").get<int>();
  c.base = ParseBaseLearner(j.at("base").get<std::string>());
  c.transform = ParseTransform(j.at("transform").get<std::string>());
  c.rotation.group_size = j.at("group_size").get<int>();
  c.rotation.sample_proportion = j.at("sample_proportion").get<double>();
  c.rotation.class_inclusion_prob = j.value("class_inclusion_prob", 0.5);
  c.bag_fraction = j.value("bag_fraction", 1.0);
  c.min_cases = j.value("min_cases", 2);
  c.random_subspace_size = j.value("random_subspace_size", 0);
  c.max_depth = j.value("max_depth", 0);
  c.prune = j.value("prune", false);
  c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("max_attributes_per_tree") && !j["max_attributes_per_tree"].is_null()) {
    c.max_attributes_per_tree = j["max_attributes_per_tree"].get<int>();
  }
  return c;
}

std::vector<double> ForestModel::Predict(std::span<const double> x) const {
  return PredictPrefixes(x, {members.size()}).front();
}

std::vector<std::vector<double>> ForestModel::PredictPrefixes(
    std::span<const double> x, const std::vector<std::size_t>& sizes) const {
  if (x.size() != num_attributes) {
    throw Error(ErrorCode::kDimensionMismatch,
                "instance has " + std::to_string(x.size()) + " values, model expects " +
                    std::to_string(num_attributes));
  }
  if (members.empty()) throw Error(ErrorCode::kUnfitted, "forest has no members");
  for (std::size_t k : sizes) {
    if (k < 1 || k > members.size()) {
      throw Error(ErrorCode::kInvalidArgument, "prefix size outside [1, members]");
    }
  }
  const std::size_t c = num_classes();
  std::vector<std::vector<double>> out(sizes.size());
  std::vector<double> sum(c, 0.0);
  std::vector<double> buffer;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& member = members[i];
    std::span<const double> input = x;
    if (member.rotation) {
      buffer.resize(member.rotation->output_size());
      ApplyRotation(*member.rotation, x, buffer);
      input = buffer;
    } else if (!IsIdentitySubset(member.attributes, num_attributes)) {
      buffer.resize(member.attributes.size());
      for (std::size_t k = 0; k < member.attributes.size(); ++k) buffer[k] = x[member.attributes[k]];
      input = buffer;
    }
    const auto dist = member.tree.Predict(input);
    for (std::size_t j = 0; j < c; ++j) sum[j] += dist[j];
    bool needed = false;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
      if (sizes[s] != i + 1) continue;
      out[s] = sum;
      const double k = static_cast<double>(i + 1);
      for (double& v : out[s]) v /= k;
    }
    for (std::size_t k : sizes) needed = needed || k > i + 1;
    if (!needed) break;
  }
  return out;
}

int ForestModel::ArgMax(std::span<const double> distribution) {
  int best = 0;
  for (std::size_t j = 1; j < distribution.size(); ++j) {
    if (distribution[j] > distribution[best]) best = static_cast<int>(j);
  }
  return best;
}

ForestModel ForestModel::Truncated(std::size_t k) const {
  ForestModel out = *this;
  if (k < out.members.size()) {
    out.members.resize(k);
    if (out.per_tree_seconds.size() > k) out.per_tree_seconds.resize(k);
    out.build_seconds = std::accumulate(out.per_tree_seconds.begin(), out.per_tree_seconds.end(), 0.0);
    out.config.trees = static_cast<int>(k);
  }
  return out;
}

std::size_t ForestModel::EstimatedBytes() const {
  std::size_t bytes = sizeof(*this);
  for (const auto& member : members) {
    bytes += member.attributes.size() * sizeof(std::size_t) + member.tree.EstimatedBytes();
    if (member.rotation) bytes += member.rotation->EstimatedBytes();
  }
  return bytes;
}

nlohmann::json ForestModel::ToJson() const {
  nlohmann::json members_json = nlohmann::json::array();
  for (const auto& member : members) {
    members_json.push_back(
        {{"attributes", member.attributes},
         {"rotation", member.rotation ? member.rotation->ToJson() : nlohmann::json(nullptr)},
         {"tree", member.tree.ToJson()}});
  }
  return {{"format", "rotforge-forest"},
          {"version", kModelFormatVersion},
          {"rng", kRngName},
          {"config", config.ToJson()},
          {"class_names", class_names},
          {"num_attributes", num_attributes},
          {"build_seconds", build_seconds},
          {"per_tree_seconds", per_tree_seconds},
          {"members", members_json}};
}

ForestModel ForestModel::FromJson(const nlohmann::json& j) {
  if (!j.contains("version")) throw Error(ErrorCode::kParse, "model file has no version field");
  if (j.at("version").get<int>() != kModelFormatVersion) {
    throw Error(ErrorCode::kParse, "unsupported model version " + j.at("version").dump());
  }
  ForestModel model;
  model.config = ForestConfig::FromJson(j.at("config"));
  model.class_names = j.at("class_names").get<std::vector<std::string>>();
  model.num_attributes = j.at("num_attributes").get<std::size_t>();
  model.build_seconds = j.value("build_seconds", 0.0);
  model.per_tree_seconds = j.value("per_tree_seconds", std::vector<double>{});
  for (const auto& mj : j.at("members")) {
    ForestMember member;
    member.attributes = mj.at("attributes").get<std::vector<std::size_t>>();
    if (!mj.at("rotation").is_null()) member.rotation = RotationSet::FromJson(mj.at("rotation"));
    member.tree = DecisionTree::FromJson(mj.at("tree"));
    const std::size_t expected =
        member.rotation ? member.rotation->output_size() : member.attributes.size();
    if (member.tree.num_attributes() != expected ||
        member.tree.num_classes() != model.class_names.size()) {
      throw Error(ErrorCode::kParse, "member tree does not match its input space");
    }
    model.members.push_back(std::move(member));
  }
  return model;
}

void ForestModel::Save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << ToJson().dump() << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

ForestModel ForestModel::Load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kNotFound, "model not found: " + path.string());
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  try {
    return FromJson(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

std::vector<std::size_t> BootstrapRows(std::size_t n, const ForestConfig& config,
                                       std::size_t index) {
  return Bootstrap(n, config.bag_fraction, DeriveSeed(DeriveSeed(config.seed, index), kBagStream));
}

ForestMember BuildMember(const Dataset& train, const ForestConfig& config, std::size_t index,
                         const MemberLimits& limits) {
  const std::uint64_t tree_seed = DeriveSeed(config.seed, index);
  const std::size_t m = train.num_attributes();

  std::optional<std::size_t> attribute_cap = limits.max_attributes;
  if (config.max_attributes_per_tree) {
    const auto fixed = static_cast<std::size_t>(*config.max_attributes_per_tree);
    attribute_cap = attribute_cap ? std::min(*attribute_cap, fixed) : fixed;
  }
  ForestMember member;
  member.attributes = SelectAttributes(m, attribute_cap, DeriveSeed(tree_seed, kAttributeStream));
  const auto rows = SelectCases(train, limits.max_cases, DeriveSeed(tree_seed, kCaseStream));

  std::vector<int> labels;
  Matrix tree_input;
  if (config.transform == Transform::kPca) {
    const Matrix x = rows.size() == train.num_cases() ? train.values : Gather(train.values, rows, nullptr);
    labels.reserve(rows.size());
    for (std::size_t r : rows) labels.push_back(train.labels[r]);
    RotationConfig rc = config.rotation;
    rc.seed = DeriveSeed(tree_seed, kRotationStream);
    member.rotation = BuildRotation(x, labels, train.num_classes(), member.attributes, rc);
    tree_input = ApplyRotation(*member.rotation, x);
  } else {
    const auto boot = Bootstrap(rows.size(), config.bag_fraction, DeriveSeed(tree_seed, kBagStream));
    std::vector<std::size_t> boot_rows(boot.size());
    for (std::size_t k = 0; k < boot.size(); ++k) boot_rows[k] = rows[boot[k]];
    labels.reserve(boot_rows.size());
    for (std::size_t r : boot_rows) labels.push_back(train.labels[r]);
    if (config.transform == Transform::kBagPca) {
      const Matrix x = Gather(train.values, boot_rows, nullptr);
      member.rotation = BuildFullPca(x, member.attributes);
      tree_input = ApplyRotation(*member.rotation, x);
    } else {
      tree_input = Gather(train.values, boot_rows, &member.attributes);
    }
  }

  TreeConfig tc;
  tc.kind = config.base == BaseLearner::kC45 ? TreeKind::kC45 : TreeKind::kRandomTree;
  tc.min_cases = config.min_cases;
  tc.random_subspace_size = config.random_subspace_size;
  tc.max_depth = config.max_depth;
  tc.prune = config.prune;
  tc.seed = DeriveSeed(tree_seed, kTreeStream);
  member.tree = BuildTree(tree_input, labels, train.num_classes(), tc);
  return member;
}

ForestModel BuildForest(const Dataset& train, const ForestConfig& config) {
  train.Validate(false);
  ValidateConfig(config, train.num_attributes());
  const auto start = Clock::now();
  ForestModel model;
  model.config = config;
  model.class_names = train.class_names;
  model.num_attributes = train.num_attributes();
  const auto k = static_cast<std::size_t>(config.trees);
  model.members.resize(k);
  model.per_tree_seconds.assign(k, 0.0);

  const std::size_t threads =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(config.num_threads, 1)), 1, k);
  if (threads == 1) {
    for (std::size_t i = 0; i < k; ++i) {
      const auto t0 = Clock::now();
      model.members[i] = BuildMember(train, config, i);
      model.per_tree_seconds[i] = SecondsSince(t0);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
      for (std::size_t i = next++; i < k && !failed; i = next++) {
        try {
          const auto t0 = Clock::now();
          model.members[i] = BuildMember(train, config, i);
          model.per_tree_seconds[i] = SecondsSince(t0);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  model.build_seconds = SecondsSince(start);
  return model;
}

ForestModel BuildRotationForest(const Dataset& train, ForestConfig config) {
  config.base = BaseLearner::kC45;
  config.transform = Transform::kPca;
  return BuildForest(train, config);
}

ForestModel BuildRandomForest(const Dataset& train, ForestConfig config) {
  config.base = BaseLearner::kRandomTree;
  config.transform = Transform::kBag;
  return BuildForest(train, config);
}

ForestModel BuildHybrid(const Dataset& train, BaseLearner base, Transform transform,
                        ForestConfig config) {
  config.base = base;
  config.transform = transform;
  return BuildForest(train, config);
}

ForestModel BuildRandomAttributeRotationForest(const Dataset& train, int max_attributes,
                                               ForestConfig config) {
  if (max_attributes < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max attributes must be >= 1");
  }
  config.base = BaseLearner::kC45;
  config.transform = Transform::kPca;
  config.max_attributes_per_tree = max_attributes;
  return BuildForest(train, config);
}

}  // namespace rotforge

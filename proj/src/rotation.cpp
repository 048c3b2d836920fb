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

#include "rotforge/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "rotforge/dataset.hpp"
#include "rotforge/random.hpp"

namespace rotforge {
namespace {

double OffDiagonalNorm(const Matrix& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

double FrobeniusNorm(const Matrix& a) {
  double sum = 0.0;
  for (double v : a.data()) sum += v * v;
  return std::sqrt(sum);
}

void FixSigns(Matrix& rows) {
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    for (std::size_t c = 0; c < rows.cols(); ++c) {
      const double v = rows(r, c);
      if (std::abs(v) > 1e-12) {
        if (v < 0.0) {
          for (std::size_t k = 0; k < rows.cols(); ++k) rows(r, k) = -rows(r, k);
        }
        break;
      }
    }
  }
}

}  // namespace

std::size_t RotationSet::EstimatedBytes() const {
  std::size_t bytes = sizeof(*this) + source_attributes.size() * sizeof(std::size_t);
  for (const auto& g : groups) {
    bytes += sizeof(FeatureGroup) +
             (g.attributes.size() + g.means.size() + g.eigenvalues.size() +
              g.projection.data().size()) *
                 sizeof(double);
  }
  return bytes;
}

nlohmann::json RotationSet::ToJson() const {
  nlohmann::json groups_json = nlohmann::json::array();
  for (const auto& g : groups) {
    groups_json.push_back({{"attributes", g.attributes},
                           {"means", g.means},
                           {"eigenvalues", g.eigenvalues},
                           {"projection", g.projection.data()}});
  }
  return {{"input_size", input_size},
          {"source_attributes", source_attributes},
          {"groups", groups_json}};
}

RotationSet RotationSet::FromJson(const nlohmann::json& j) {
  RotationSet rs;
  rs.input_size = j.at("input_size").get<std::size_t>();
  rs.source_attributes = j.at("source_attributes").get<std::vector<std::size_t>>();
  for (const auto& gj : j.at("groups")) {
    FeatureGroup g;
    g.attributes = gj.at("attributes").get<std::vector<std::size_t>>();
    g.means = gj.at("means").get<std::vector<double>>();
    g.eigenvalues = gj.value("eigenvalues", std::vector<double>{});
    const auto flat = gj.at("projection").get<std::vector<double>>();
    const std::size_t f = g.attributes.size();
    if (g.means.size() != f || flat.size() != f * f) {
      throw Error(ErrorCode::kParse, "malformed rotation group");
    }
    for (std::size_t a : g.attributes) {
      if (a >= rs.input_size) throw Error(ErrorCode::kParse, "rotation attribute out of range");
    }
    g.projection = Matrix(f, f);
    g.projection.data() = flat;
    rs.groups.push_back(std::move(g));
  }
  return rs;
}

EigenDecomposition JacobiEigen(const Matrix& symmetric, double tolerance, int max_sweeps) {
  const std::size_t n = symmetric.rows();
  if (symmetric.cols() != n) throw Error(ErrorCode::kDimensionMismatch, "matrix not square");
  for (double v : symmetric.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNumeric, "non-finite matrix entry");
  }
  Matrix a = symmetric;
  Matrix v = Matrix::Identity(n);  // columns accumulate eigenvectors
  const double scale = FrobeniusNorm(a);
  const double target = tolerance * std::max(scale, 1.0);
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (OffDiagonalNorm(a) < target) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  EigenDecomposition out;
  out.sweeps = sweep;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    out.values[r] = a(order[r], order[r]);
    for (std::size_t k = 0; k < n; ++k) out.vectors(r, k) = v(k, order[r]);
  }
  FixSigns(out.vectors);
  return out;
}

Matrix Covariance(const Matrix& subset, std::vector<double>* means) {
  const std::size_t a = subset.rows();
  const std::size_t b = subset.cols();
  std::vector<double> mu(b, 0.0);
  for (std::size_t i = 0; i < a; ++i) {
    for (std::size_t j = 0; j < b; ++j) mu[j] += subset(i, j);
  }
  for (double& v : mu) v /= static_cast<double>(std::max<std::size_t>(a, 1));
  Matrix cov(b, b);
  if (a >= 2) {
    for (std::size_t i = 0; i < a; ++i) {
      for (std::size_t p = 0; p < b; ++p) {
        const double dp = subset(i, p) - mu[p];
        for (std::size_t q = p; q < b; ++q) cov(p, q) += dp * (subset(i, q) - mu[q]);
      }
    }
    const double divisor = static_cast<double>(a - 1);
    for (std::size_t p = 0; p < b; ++p) {
      for (std::size_t q = p; q < b; ++q) {
        cov(p, q) /= divisor;
        cov(q, p) = cov(p, q);
      }
    }
  }
  if (means) *means = std::move(mu);
  return cov;
}

PcaFit PcaFitMatrix(const Matrix& subset) {
  if (subset.rows() < 1 || subset.cols() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "PCA needs at least one row and column");
  }
  for (double v : subset.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNumeric, "non-finite PCA input");
  }
  PcaFit fit;
  const Matrix cov = Covariance(subset, &fit.means);
  auto eig = JacobiEigen(cov);
  fit.projection = std::move(eig.vectors);
  fit.eigenvalues = std::move(eig.values);
  return fit;
}

std::vector<std::vector<std::size_t>> PartitionFeatures(std::vector<std::size_t> attributes,
                                                        std::size_t group_size, CounterRng& rng) {
  if (group_size == 0) throw Error(ErrorCode::kInvalidArgument, "group size must be >= 1");
  rng.Shuffle(attributes);
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t start = 0; start < attributes.size(); start += group_size) {
    const std::size_t end = std::min(start + group_size, attributes.size());
    groups.emplace_back(attributes.begin() + static_cast<std::ptrdiff_t>(start),
                        attributes.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return groups;
}

std::vector<std::size_t> SampleGroupCases(std::span<const int> labels, std::size_t num_classes,
                                          const RotationConfig& config, CounterRng& rng) {
  std::vector<std::size_t> counts(num_classes, 0);
  for (int y : labels) ++counts[y];
  std::vector<bool> selected(num_classes, false);
  bool any = false;
  for (int attempt = 0; attempt < kMaxClassRedraws && !any; ++attempt) {
    for (std::size_t j = 0; j < num_classes; ++j) {
      selected[j] = rng.Bernoulli(config.class_inclusion_prob);
      if (selected[j] && counts[j] > 0) any = true;
    }
  }
  if (!any) std::fill(selected.begin(), selected.end(), true);

  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (selected[labels[i]]) pool.push_back(i);
  }
  const auto want = static_cast<std::size_t>(
      std::ceil(config.sample_proportion * static_cast<double>(pool.size()) - 1e-9));
  const auto picks = rng.SampleWithoutReplacement(pool.size(), std::max<std::size_t>(want, 1));
  std::vector<std::size_t> out;
  out.reserve(picks.size());
  for (std::size_t k : picks) out.push_back(pool[k]);
  return out;
}

RotationSet BuildRotation(const Matrix& x, std::span<const int> labels, std::size_t num_classes,
                          const std::vector<std::size_t>& attributes,
                          const RotationConfig& config) {
  if (config.group_size < 1) throw Error(ErrorCode::kInvalidArgument, "group size must be >= 1");
  if (!(config.sample_proportion > 0.0 && config.sample_proportion <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sample proportion must lie in (0,1]");
  }
  std::vector<std::size_t> attrs = attributes;
  if (attrs.empty()) {
    attrs.resize(x.cols());
    std::iota(attrs.begin(), attrs.end(), std::size_t{0});
  }
  for (std::size_t a : attrs) {
    if (a >= x.cols()) throw Error(ErrorCode::kInvalidArgument, "attribute index out of range");
  }
  CounterRng rng(config.seed);
  RotationSet rs;
  rs.input_size = x.cols();
  rs.source_attributes = attrs;
  std::sort(rs.source_attributes.begin(), rs.source_attributes.end());
  for (auto& group_attrs : PartitionFeatures(attrs, static_cast<std::size_t>(config.group_size), rng)) {
    const auto rows = SampleGroupCases(labels, num_classes, config, rng);
    Matrix subset(rows.size(), group_attrs.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < group_attrs.size(); ++c) subset(r, c) = x(rows[r], group_attrs[c]);
    }
    PcaFit fit = PcaFitMatrix(subset);
    rs.groups.push_back(FeatureGroup{std::move(group_attrs), std::move(fit.means),
                                     std::move(fit.projection), std::move(fit.eigenvalues)});
  }
  return rs;
}

RotationSet BuildRotation(const Dataset& train, const std::vector<std::size_t>& attributes,
                          const RotationConfig& config) {
  return BuildRotation(train.values, train.labels, train.num_classes(), attributes, config);
}

RotationSet BuildFullPca(const Matrix& x, const std::vector<std::size_t>& attributes) {
  RotationSet rs;
  rs.input_size = x.cols();
  rs.source_attributes = attributes;
  std::sort(rs.source_attributes.begin(), rs.source_attributes.end());
  Matrix subset(x.rows(), attributes.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < attributes.size(); ++c) subset(r, c) = x(r, attributes[c]);
  }
  PcaFit fit = PcaFitMatrix(subset);
  rs.groups.push_back(FeatureGroup{attributes, std::move(fit.means), std::move(fit.projection),
                                   std::move(fit.eigenvalues)});
  return rs;
}

void ApplyRotation(const RotationSet& rs, std::span<const double> x, std::span<double> out) {
  if (x.size() != rs.input_size) {
    throw Error(ErrorCode::kDimensionMismatch,
                "instance has " + std::to_string(x.size()) + " values, rotation expects " +
                    std::to_string(rs.input_size));
  }
  if (out.size() != rs.output_size()) {
    throw Error(ErrorCode::kDimensionMismatch, "rotation output buffer has wrong size");
  }
  std::size_t offset = 0;
  double centered[64];
  std::vector<double> heap;
  for (const auto& g : rs.groups) {
    const std::size_t f = g.attributes.size();
    double* buf = centered;
    if (f > 64) {
      heap.resize(f);
      buf = heap.data();
    }
    for (std::size_t c = 0; c < f; ++c) buf[c] = x[g.attributes[c]] - g.means[c];
    for (std::size_t r = 0; r < f; ++r) {
      double sum = 0.0;
      const auto row = g.projection.row(r);
      for (std::size_t c = 0; c < f; ++c) sum += row[c] * buf[c];
      out[offset + r] = sum;
    }
    offset += f;
  }
}

std::vector<double> ApplyRotation(const RotationSet& rs, std::span<const double> x) {
  std::vector<double> out(rs.output_size());
  ApplyRotation(rs, x, out);
  return out;
}

Matrix ApplyRotation(const RotationSet& rs, const Matrix& x) {
  Matrix out(x.rows(), rs.output_size());
  for (std::size_t i = 0; i < x.rows(); ++i) ApplyRotation(rs, x.row(i), out.row(i));
  return out;
}

}  // namespace rotforge

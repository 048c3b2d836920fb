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

#include "rotforge/timing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include <boost/math/distributions/students_t.hpp>
#include <nlohmann/json.hpp>

#include "rotforge/forest.hpp"
#include "rotforge/synthetic.hpp"
#include "text_util.hpp"

namespace rotforge {
namespace {

constexpr double kRankTolerance = 1e-10;

}  // namespace

const char* TimeUnitName(TimeUnit unit) {
  switch (unit) {
    case TimeUnit::kSeconds: return "seconds";
    case TimeUnit::kMinutes: return "minutes";
    case TimeUnit::kHours: return "hours";
  }
  return "?";
}

TimeUnit ParseTimeUnit(const std::string& name) {
  if (name == "seconds" || name == "s") return TimeUnit::kSeconds;
  if (name == "minutes" || name == "min") return TimeUnit::kMinutes;
  if (name == "hours" || name == "h") return TimeUnit::kHours;
  throw Error(ErrorCode::kInvalidArgument, "unknown time unit '" + name + "'");
}

double SecondsPerUnit(TimeUnit unit) {
  switch (unit) {
    case TimeUnit::kSeconds: return 1.0;
    case TimeUnit::kMinutes: return 60.0;
    case TimeUnit::kHours: return 3600.0;
  }
  return 1.0;
}

std::vector<TimingObservation> LoadTimingObservations(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kNotFound, "timing file not found: " + path.string());
  }
  std::ifstream in(path);
  std::string line;
  std::vector<TimingObservation> out;
  bool header = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (internal::Trim(line).empty()) continue;
    const auto fields = internal::SplitRecord(line, ',');
    if (header) {
      header = false;
      if (fields.size() != 4 || fields[0] != "dataset" || fields[1] != "n" || fields[2] != "m" ||
          fields[3] != "seconds") {
        throw Error(ErrorCode::kSchemaMismatch,
                    path.string() + ": expected header dataset,n,m,seconds");
      }
      continue;
    }
    if (fields.size() != 4) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) +
                                         ": expected 4 fields");
    }
    const auto n = internal::ParseDouble(fields[1]);
    const auto m = internal::ParseDouble(fields[2]);
    const auto s = internal::ParseDouble(fields[3]);
    if (!n || !m || !s || *n < 1 || *m < 1 || *s <= 0) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) +
                                         ": invalid observation");
    }
    out.push_back({fields[0], *n, *m, *s});
  }
  return out;
}

void SaveTimingObservations(const std::vector<TimingObservation>& obs,
                            const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << "dataset,n,m,seconds\n";
  for (const auto& o : obs) {
    out << internal::CsvEscape(o.dataset) << ',' << internal::FormatDouble(o.n) << ','
        << internal::FormatDouble(o.m) << ',' << internal::FormatDouble(o.seconds) << '\n';
  }
}

TimingModel TimingModel::Published() {
  TimingModel model;
  model.coefficients = {0.64, 0.132 / 1000.0, 0.246 / 1000.0, 0.615 / 1'000'000.0};
  model.unit = TimeUnit::kHours;
  return model;
}

std::vector<double> TimingModel::Regressors(double n, double m) const {
  std::vector<double> x = {1.0, n, m, m * n};
  if (include_nlogn) x.push_back(m * n * std::log(std::max(n, 1.0)));
  return x;
}

double TimingModel::Predict(double n, double m) const {
  const auto x = Regressors(n, m);
  if (coefficients.size() != x.size()) throw Error(ErrorCode::kUnfitted, "timing model has no coefficients");
  double y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) y += coefficients[i] * x[i];
  return calibration_scale * y;
}

Interval TimingModel::PredictionInterval(double n, double m, double alpha) const {
  if (!fitted()) {
    throw Error(ErrorCode::kUnfitted, "prediction interval needs a fitted model (X'X inverse)");
  }
  if (dof < 1) throw Error(ErrorCode::kUnfitted, "prediction interval needs dof >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0,1)");
  const auto x = Regressors(n, m);
  const std::size_t p = x.size();
  std::vector<double> v(p);
  for (std::size_t i = 0; i < p; ++i) v[i] = x[i] / column_scale_[i];
  double quad = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) quad += v[i] * scaled_inverse_(i, j) * v[j];
  }
  const double y = Predict(n, m);
  const boost::math::students_t dist(static_cast<double>(dof));
  const double t = boost::math::quantile(dist, 1.0 - alpha / 2.0);
  const double half = calibration_scale * residual_std * t * std::sqrt(1.0 + std::max(quad, 0.0));
  return {y - half, y + half};
}

Matrix TimingModel::XtxInverse() const {
  const std::size_t p = scaled_inverse_.rows();
  Matrix out(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      out(i, j) = scaled_inverse_(i, j) / (column_scale_[i] * column_scale_[j]);
    }
  }
  return out;
}

nlohmann::json TimingModel::ToJson() const {
  nlohmann::json j = {{"format", "rotforge-timing"},
                      {"version", 1},
                      {"coefficients", coefficients},
                      {"include_nlogn", include_nlogn},
                      {"residual_std", residual_std},
                      {"dof", dof},
                      {"calibration_scale", calibration_scale},
                      {"unit", TimeUnitName(unit)}};
  if (fitted()) {
    const Matrix inv = XtxInverse();
    j["xtx_inverse"] = inv.data();
    j["column_scale"] = column_scale_;
  } else {
    j["xtx_inverse"] = nullptr;
  }
  return j;
}

TimingModel TimingModel::FromJson(const nlohmann::json& j) {
  TimingModel model;
  model.coefficients = j.at("coefficients").get<std::vector<double>>();
  model.include_nlogn = j.value("include_nlogn", false);
  model.residual_std = j.value("residual_std", 0.0);
  model.dof = j.value("dof", 0);
  model.calibration_scale = j.value("calibration_scale", 1.0);
  model.unit = ParseTimeUnit(j.value("unit", std::string("seconds")));
  const std::size_t p = model.include_nlogn ? 5 : 4;
  if (model.coefficients.size() != p) throw Error(ErrorCode::kParse, "wrong number of coefficients");
  if (!(model.calibration_scale > 0.0)) {
    throw Error(ErrorCode::kParse, "calibration scale must be positive");
  }
  if (j.contains("xtx_inverse") && !j["xtx_inverse"].is_null()) {
    const auto flat = j["xtx_inverse"].get<std::vector<double>>();
    model.column_scale_ = j.at("column_scale").get<std::vector<double>>();
    if (flat.size() != p * p || model.column_scale_.size() != p) {
      throw Error(ErrorCode::kParse, "malformed xtx_inverse");
    }
    model.scaled_inverse_ = Matrix(p, p);
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = 0; b < p; ++b) {
        model.scaled_inverse_(a, b) =
            flat[a * p + b] * model.column_scale_[a] * model.column_scale_[b];
      }
    }
  }
  return model;
}

void TimingModel::Save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << ToJson().dump(2) << '\n';
}

TimingModel TimingModel::Load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kNotFound, "timing model not found: " + path.string());
  }
  std::ifstream in(path);
  try {
    nlohmann::json j;
    in >> j;
    return FromJson(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

TimingModel FitTimingModel(const std::vector<TimingObservation>& observations, bool include_nlogn,
                           TimeUnit unit) {
  TimingModel model;
  model.include_nlogn = include_nlogn;
  model.unit = unit;
  const std::size_t p = include_nlogn ? 5 : 4;
  const std::size_t rows = observations.size();
  if (rows < 6 || rows <= p) {
    throw Error(ErrorCode::kTooFewObservations,
                "need at least 6 timing observations, got " + std::to_string(rows));
  }
  Matrix x(rows, p);
  std::vector<double> y(rows);
  const double per_unit = SecondsPerUnit(unit);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& o = observations[i];
    if (!(o.n >= 1 && o.m >= 1 && o.seconds > 0)) {
      throw Error(ErrorCode::kInvalidArgument, "invalid timing observation");
    }
    const auto r = model.Regressors(o.n, o.m);
    for (std::size_t c = 0; c < p; ++c) x(i, c) = r[c];
    y[i] = o.seconds / per_unit;
  }
  std::vector<double> scale(p, 0.0);
  for (std::size_t c = 0; c < p; ++c) {
    for (std::size_t i = 0; i < rows; ++i) scale[c] = std::max(scale[c], std::abs(x(i, c)));
    if (scale[c] == 0.0) throw Error(ErrorCode::kRankDeficient, "design column is all zero");
    for (std::size_t i = 0; i < rows; ++i) x(i, c) /= scale[c];
  }

  // Householder QR: x becomes R in its upper triangle; qty = Q'y.
  Matrix a = x;
  std::vector<double> qty = y;
  for (std::size_t k = 0; k < p; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < rows; ++i) norm += a(i, k) * a(i, k);
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    const double alpha = a(k, k) > 0 ? -norm : norm;
    std::vector<double> v(rows - k);
    for (std::size_t i = k; i < rows; ++i) v[i - k] = a(i, k);
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (double e : v) vnorm2 += e * e;
    if (vnorm2 == 0.0) continue;
    for (std::size_t c = k; c < p; ++c) {
      double dot = 0.0;
      for (std::size_t i = k; i < rows; ++i) dot += v[i - k] * a(i, c);
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t i = k; i < rows; ++i) a(i, c) -= f * v[i - k];
    }
    double dot = 0.0;
    for (std::size_t i = k; i < rows; ++i) dot += v[i - k] * qty[i];
    const double f = 2.0 * dot / vnorm2;
    for (std::size_t i = k; i < rows; ++i) qty[i] -= f * v[i - k];
  }
  double max_diag = 0.0;
  for (std::size_t k = 0; k < p; ++k) max_diag = std::max(max_diag, std::abs(a(k, k)));
  for (std::size_t k = 0; k < p; ++k) {
    if (std::abs(a(k, k)) <= kRankTolerance * max_diag) {
      throw Error(ErrorCode::kRankDeficient, "timing design matrix is rank deficient");
    }
  }
  // Back substitution for scaled coefficients.
  std::vector<double> beta(p, 0.0);
  for (std::size_t k = p; k-- > 0;) {
    double sum = qty[k];
    for (std::size_t c = k + 1; c < p; ++c) sum -= a(k, c) * beta[c];
    beta[k] = sum / a(k, k);
  }
  // R^-1 (upper triangular), then (R'R)^-1 = R^-1 R^-T.
  Matrix rinv(p, p);
  for (std::size_t col = 0; col < p; ++col) {
    for (std::size_t k = p; k-- > 0;) {
      double sum = k == col ? 1.0 : 0.0;
      for (std::size_t c = k + 1; c < p; ++c) sum -= a(k, c) * rinv(c, col);
      rinv(k, col) = sum / a(k, k);
    }
  }
  Matrix inv(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < p; ++k) sum += rinv(i, k) * rinv(j, k);
      inv(i, j) = sum;
    }
  }

  model.coefficients.resize(p);
  for (std::size_t c = 0; c < p; ++c) model.coefficients[c] = beta[c] / scale[c];
  double sse = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    double fit = 0.0;
    for (std::size_t c = 0; c < p; ++c) fit += x(i, c) * beta[c];
    sse += (y[i] - fit) * (y[i] - fit);
  }
  model.dof = static_cast<int>(rows - p);
  model.residual_std = std::sqrt(sse / model.dof);
  model.scaled_inverse_ = std::move(inv);
  model.column_scale_ = std::move(scale);
  return model;
}

double Calibrate(const std::function<double()>& runner, double reference_seconds) {
  if (!(reference_seconds > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "reference seconds must be positive");
  }
  constexpr double kMinElapsed = 0.010;
  double total = 0.0;
  int repetitions = 0;
  while (total < kMinElapsed && repetitions < 1'000'000) {
    total += runner();
    ++repetitions;
  }
  if (total <= 0.0) throw Error(ErrorCode::kNumeric, "timer resolution too coarse for calibration");
  return (total / repetitions) / reference_seconds;
}

double RunReferenceWorkload() {
  ObliqueSpec spec;
  spec.cases = 2000;
  spec.attributes = 60;
  spec.seed = 0;
  const Dataset data = MakeObliqueDataset(spec);
  ForestConfig config = ForestConfig::RotationForestDefaults();
  config.trees = 20;
  config.seed = 0;
  const auto start = std::chrono::steady_clock::now();
  const ForestModel model = BuildRotationForest(data, config);
  (void)model;
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::size_t EstimateMaxAttributes(std::size_t m, std::size_t n, int e_min, double t_hat,
                                  double budget, const TimingModel& model,
                                  std::size_t min_attributes) {
  (void)e_min;  // t_hat already refers to the e_min-tree horizon
  const std::size_t lo = std::min(std::max<std::size_t>(min_attributes, 1), m);
  if (!(budget > 0.0)) return lo;
  const double speedup = t_hat / budget;
  if (speedup <= 1.0) return m;
  const auto& b = model.coefficients;
  const double dn = static_cast<double>(n);
  double slope = b[2] + b[3] * dn;
  if (model.include_nlogn) slope += b[4] * dn * std::log(std::max(dn, 1.0));
  if (slope <= 0.0) return m;
  const double intercept = b[0] + b[1] * dn;
  const double full = intercept + slope * static_cast<double>(m);
  const double target = full / speedup;
  const double solved = (target - intercept) / slope;
  if (!(solved >= static_cast<double>(lo))) return lo;
  return std::clamp(static_cast<std::size_t>(std::floor(solved)), lo, m);
}

std::size_t EstimateMaxCases(std::size_t n, std::size_t m, int e_min, double t_hat,
                             double budget, const TimingModel& model, std::size_t num_classes) {
  (void)e_min;
  const std::size_t lo = std::min(std::max<std::size_t>(2 * num_classes, 1), n);
  if (!(budget > 0.0)) return lo;
  const double speedup = t_hat / budget;
  if (speedup <= 1.0) return n;
  const double dm = static_cast<double>(m);
  const double target = model.Predict(static_cast<double>(n), dm) / speedup;
  double left = static_cast<double>(lo);
  double right = static_cast<double>(n);
  if (model.Predict(left, dm) > target) return lo;
  if (model.Predict(right, dm) <= target) return n;
  for (int iter = 0; iter < 200 && right - left > 1e-6; ++iter) {
    const double mid = 0.5 * (left + right);
    if (model.Predict(mid, dm) <= target) left = mid;
    else right = mid;
  }
  return std::clamp(static_cast<std::size_t>(std::floor(left)), lo, n);
}

}  // namespace rotforge

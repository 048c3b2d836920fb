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

#include "rotforge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <nlohmann/json.hpp>

#include "text_util.hpp"

namespace rotforge {
namespace {

// Mid-ranks (1-based) of values in ascending order.
std::vector<double> MidRanks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo;
    while (hi + 1 < n && values[order[hi + 1]] == values[order[lo]]) ++hi;
    const double mid = 0.5 * static_cast<double>(lo + hi) + 1.0;
    for (std::size_t r = lo; r <= hi; ++r) ranks[order[r]] = mid;
    lo = hi + 1;
  }
  return ranks;
}

void RequireSameLength(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::kDimensionMismatch, "paired samples differ in length");
}

}  // namespace

double WilcoxonExactP(const std::vector<double>& abs_ranks, double w_plus) {
  std::vector<std::size_t> doubled;
  std::size_t total = 0;
  for (double r : abs_ranks) {
    doubled.push_back(static_cast<std::size_t>(std::llround(2.0 * r)));
    total += doubled.back();
  }
  // counts[s]: sign patterns whose doubled positive rank sum is s.
  std::vector<double> counts(total + 1, 0.0);
  counts[0] = 1.0;
  std::size_t reach = 0;
  for (std::size_t d : doubled) {
    for (std::size_t s = reach + 1; s-- > 0;) {
      if (counts[s] != 0.0) counts[s + d] += counts[s];
    }
    reach += d;
  }
  const double patterns = std::ldexp(1.0, static_cast<int>(doubled.size()));
  const auto w2 = static_cast<std::size_t>(std::llround(2.0 * w_plus));
  double le = 0.0, ge = 0.0;
  for (std::size_t s = 0; s <= total; ++s) {
    if (s <= w2) le += counts[s];
    if (s >= w2) ge += counts[s];
  }
  return std::min(1.0, 2.0 * std::min(le, ge) / patterns);
}

TestResult WilcoxonSignedRank(const std::vector<double>& x, const std::vector<double>& y) {
  RequireSameLength(x, y);
  std::vector<double> diffs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d != 0.0) diffs.push_back(d);
  }
  TestResult r;
  r.n = diffs.size();
  if (diffs.empty()) {
    r.degenerate = true;
    r.p_value = 1.0;
    return r;
  }
  std::vector<double> magnitudes(diffs.size());
  for (std::size_t i = 0; i < diffs.size(); ++i) magnitudes[i] = std::abs(diffs[i]);
  const auto ranks = MidRanks(magnitudes);
  double w_plus = 0.0;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (diffs[i] > 0) w_plus += ranks[i];
  }
  r.statistic = w_plus;
  if (diffs.size() <= kWilcoxonExactLimit) {
    r.exact = true;
    r.p_value = WilcoxonExactP(ranks, w_plus);
    return r;
  }
  const double n = static_cast<double>(diffs.size());
  const double mean = n * (n + 1.0) / 4.0;
  double tie_term = 0.0;
  std::map<double, std::size_t> ties;
  for (double rank : ranks) ++ties[rank];
  for (const auto& [rank, t] : ties) {
    const double tt = static_cast<double>(t);
    tie_term += tt * tt * tt - tt;
  }
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  const double z = std::max(0.0, std::abs(w_plus - mean) - 0.5) / std::sqrt(var);
  r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(
                                      boost::math::normal_distribution<>(), z)));
  return r;
}

TestResult PairedT(const std::vector<double>& x, const std::vector<double>& y) {
  RequireSameLength(x, y);
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorCode::kTooFewObservations, "paired t needs at least 2 pairs");
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += x[i] - y[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss += (x[i] - y[i] - mean) * (x[i] - y[i] - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  TestResult r;
  r.n = n;
  if (sd == 0.0) {
    r.degenerate = true;
    r.p_value = mean == 0.0 ? 1.0 : 0.0;
    r.statistic = mean == 0.0 ? 0.0 : std::copysign(INFINITY, mean);
    return r;
  }
  r.statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.statistic))));
  return r;
}

const char* MetricName(Metric metric) {
  switch (metric) {
    case Metric::kError: return "error";
    case Metric::kBalancedError: return "balanced_error";
    case Metric::kAuc: return "auc";
    case Metric::kNll: return "nll";
    case Metric::kBuildSeconds: return "build_seconds";
  }
  return "?";
}

Metric ParseMetric(const std::string& name) {
  for (Metric m : {Metric::kError, Metric::kBalancedError, Metric::kAuc, Metric::kNll,
                   Metric::kBuildSeconds}) {
    if (name == MetricName(m)) return m;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + name + "'");
}

bool LowerIsBetter(Metric metric) { return metric != Metric::kAuc; }

std::vector<double> ResultsMatrix::Column(std::size_t k) const {
  std::vector<double> out(num_datasets());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = means(i, k);
  return out;
}

ResultsMatrix LoadResults(const std::vector<std::filesystem::path>& paths, Metric metric) {
  static const std::vector<std::string> kColumns = {"dataset", "classifier", "resample", "error",
                                                    "balanced_error", "auc", "nll",
                                                    "build_seconds"};
  const std::size_t column = 3 + static_cast<std::size_t>(metric);
  ResultsMatrix out;
  out.lower_is_better = LowerIsBetter(metric);
  std::map<std::string, std::size_t> dataset_index, classifier_index;
  // (dataset, classifier) -> resample -> value
  std::map<std::pair<std::size_t, std::size_t>, std::map<long long, double>> cells;
  for (const auto& path : paths) {
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorCode::kNotFound, "results file not found: " + path.string());
    }
    std::ifstream in(path);
    std::string line;
    std::size_t line_no = 0;
    bool header = true;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (internal::Trim(line).empty()) continue;
      const auto fields = internal::SplitRecord(line, ',');
      const std::string where = path.string() + ":" + std::to_string(line_no);
      if (header) {
        header = false;
        if (fields != kColumns) throw Error(ErrorCode::kSchemaMismatch, where + ": unexpected header");
        continue;
      }
      if (fields.size() != kColumns.size()) {
        throw Error(ErrorCode::kSchemaMismatch, where + ": expected 8 fields");
      }
      const auto resample = internal::ParseDouble(fields[2]);
      const auto value = internal::ParseDouble(fields[column]);
      if (!resample || !value || *resample < 0 || std::floor(*resample) != *resample) {
        throw Error(ErrorCode::kParse, where + ": invalid number");
      }
      auto [d, d_new] = dataset_index.emplace(fields[0], out.datasets.size());
      if (d_new) out.datasets.push_back(fields[0]);
      auto [c, c_new] = classifier_index.emplace(fields[1], out.classifiers.size());
      if (c_new) out.classifiers.push_back(fields[1]);
      auto& cell = cells[{d->second, c->second}];
      if (!cell.emplace(static_cast<long long>(*resample), *value).second) {
        throw Error(ErrorCode::kSchemaMismatch, where + ": duplicate resample");
      }
    }
  }
  const std::size_t n = out.datasets.size();
  const std::size_t k = out.classifiers.size();
  if (n == 0 || k == 0) throw Error(ErrorCode::kSchemaMismatch, "no result rows");
  out.means = Matrix(n, k);
  out.per_resample.assign(n, std::vector<std::vector<double>>(k));
  std::optional<std::size_t> resamples;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const auto it = cells.find({i, j});
      if (it == cells.end()) {
        throw Error(ErrorCode::kSchemaMismatch,
                    "missing results for " + out.classifiers[j] + " on " + out.datasets[i]);
      }
      if (resamples && *resamples != it->second.size()) {
        throw Error(ErrorCode::kSchemaMismatch, "resample counts differ between cells");
      }
      resamples = it->second.size();
      double sum = 0.0;
      for (const auto& [id, v] : it->second) {
        out.per_resample[i][j].push_back(v);
        sum += v;
      }
      out.means(i, j) = sum / static_cast<double>(it->second.size());
    }
  }
  return out;
}

std::vector<double> MeanRanks(const ResultsMatrix& results) {
  const std::size_t n = results.num_datasets();
  const std::size_t k = results.num_classifiers();
  std::vector<double> mean(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(k);
    for (std::size_t j = 0; j < k; ++j) {
      row[j] = results.lower_is_better ? results.means(i, j) : -results.means(i, j);
    }
    const auto r = MidRanks(row);
    for (std::size_t j = 0; j < k; ++j) mean[j] += r[j];
  }
  for (double& v : mean) v /= static_cast<double>(n);
  return mean;
}

FriedmanResult Friedman(const ResultsMatrix& results) {
  const std::size_t n = results.num_datasets();
  const std::size_t k = results.num_classifiers();
  if (k < 2 || n < 2) throw Error(ErrorCode::kInvalidArgument, "Friedman needs K >= 2 and N >= 2");
  FriedmanResult f;
  f.mean_ranks = MeanRanks(results);
  const double dk = static_cast<double>(k);
  const double dn = static_cast<double>(n);
  double sum_sq = 0.0;
  for (double r : f.mean_ranks) sum_sq += r * r;
  f.statistic = 12.0 * dn / (dk * (dk + 1.0)) * (sum_sq - dk * (dk + 1.0) * (dk + 1.0) / 4.0);
  f.statistic = std::max(f.statistic, 0.0);
  f.dof = static_cast<int>(k - 1);
  const boost::math::chi_squared dist(static_cast<double>(f.dof));
  f.p_value = boost::math::cdf(boost::math::complement(dist, f.statistic));
  return f;
}

std::vector<bool> HolmStepDown(const std::vector<double>& p_values, double alpha) {
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<bool> rejected(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(p_values[order[i]] <= alpha / static_cast<double>(m - i))) break;
    rejected[order[i]] = true;
  }
  return rejected;
}

std::vector<std::vector<std::size_t>> FormCliques(const std::vector<double>& ranks,
                                                  const std::vector<std::vector<bool>>& rejected) {
  const std::size_t k = ranks.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ranks[a] < ranks[b]; });
  // Longest clean interval starting at each position; keep those not
  // contained in the previous one.
  std::vector<std::vector<std::size_t>> cliques;
  std::size_t previous_end = 0;
  for (std::size_t start = 0; start < k; ++start) {
    std::size_t end = start;
    while (end + 1 < k) {
      bool clean = true;
      for (std::size_t a = start; a <= end && clean; ++a) {
        clean = !rejected[order[a]][order[end + 1]];
      }
      if (!clean) break;
      ++end;
    }
    if (start > 0 && end <= previous_end) continue;
    cliques.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end) + 1);
    previous_end = end;
  }
  return cliques;
}

CliqueReport HolmCliques(const ResultsMatrix& results, double alpha) {
  const std::size_t k = results.num_classifiers();
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two classifiers");
  CliqueReport report;
  report.classifiers = results.classifiers;
  report.alpha = alpha;
  report.average_ranks = MeanRanks(results);
  report.pairwise_p = Matrix(k, k);
  std::vector<double> p_values;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < k; ++a) {
    report.pairwise_p(a, a) = 1.0;
    for (std::size_t b = a + 1; b < k; ++b) {
      const double p = WilcoxonSignedRank(results.Column(a), results.Column(b)).p_value;
      report.pairwise_p(a, b) = report.pairwise_p(b, a) = p;
      p_values.push_back(p);
      pairs.emplace_back(a, b);
    }
  }
  const auto rejected = HolmStepDown(p_values, alpha);
  report.rejected.assign(k, std::vector<bool>(k, false));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    report.rejected[pairs[i].first][pairs[i].second] = rejected[i];
    report.rejected[pairs[i].second][pairs[i].first] = rejected[i];
  }
  report.cliques = FormCliques(report.average_ranks, report.rejected);
  if (results.num_datasets() >= 2) report.friedman = Friedman(results);
  return report;
}

nlohmann::json CliqueReport::ToJson() const {
  nlohmann::json j;
  j["classifiers"] = classifiers;
  j["ranks"] = average_ranks;
  j["alpha"] = alpha;
  j["cliques"] = cliques;
  nlohmann::json named = nlohmann::json::array();
  for (const auto& clique : cliques) {
    std::vector<std::string> names;
    for (std::size_t idx : clique) names.push_back(classifiers[idx]);
    named.push_back(names);
  }
  j["clique_names"] = named;
  const std::size_t k = classifiers.size();
  std::vector<std::vector<double>> p(k, std::vector<double>(k));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) p[a][b] = pairwise_p(a, b);
  }
  j["pairwise_p"] = p;
  j["rejected"] = rejected;
  if (friedman) {
    j["friedman"] = {{"statistic", friedman->statistic},
                     {"p_value", friedman->p_value},
                     {"dof", friedman->dof}};
  } else {
    j["friedman"] = nullptr;
  }
  return j;
}

std::string RenderCdSvg(const CliqueReport& report) {
  const std::size_t k = report.classifiers.size();
  const double left = 120.0, right = 680.0, axis_y = 60.0;
  const double span = std::max<double>(static_cast<double>(k) - 1.0, 1.0);
  auto x_of = [&](double rank) { return left + (rank - 1.0) / span * (right - left); };
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.average_ranks[a] < report.average_ranks[b];
  });
  std::size_t bars = 0;
  for (const auto& c : report.cliques) bars += c.size() >= 2;
  const double label_top = axis_y + 30.0 + 10.0 * static_cast<double>(bars);
  const double height = label_top + 22.0 * static_cast<double>(k) + 20.0;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<line class=\"axis\" x1=\"" << left << "\" y1=\"" << axis_y << "\" x2=\"" << right
     << "\" y2=\"" << axis_y << "\" stroke=\"black\"/>\n";
  for (std::size_t r = 1; r <= std::max<std::size_t>(k, 2); ++r) {
    const double x = x_of(static_cast<double>(r));
    os << "<line x1=\"" << x << "\" y1=\"" << axis_y - 5 << "\" x2=\"" << x << "\" y2=\""
       << axis_y << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << x << "\" y=\"" << axis_y - 10 << "\" text-anchor=\"middle\">" << r
       << "</text>\n";
  }
  std::size_t bar = 0;
  for (const auto& clique : report.cliques) {
    if (clique.size() < 2) continue;
    double lo = report.average_ranks[clique.front()], hi = lo;
    for (std::size_t idx : clique) {
      lo = std::min(lo, report.average_ranks[idx]);
      hi = std::max(hi, report.average_ranks[idx]);
    }
    const double y = axis_y + 15.0 + 10.0 * static_cast<double>(bar++);
    os << "<line class=\"clique\" x1=\"" << x_of(lo) - 3 << "\" y1=\"" << y << "\" x2=\""
       << x_of(hi) + 3 << "\" y2=\"" << y << "\" stroke=\"black\" stroke-width=\"4\"/>\n";
  }
  for (std::size_t pos = 0; pos < k; ++pos) {
    const std::size_t idx = order[pos];
    const double x = x_of(report.average_ranks[idx]);
    const double y = label_top + 22.0 * static_cast<double>(pos);
    const bool left_side = pos < (k + 1) / 2;
    const double tx = left_side ? left - 10 : right + 10;
    os << "<polyline class=\"label-line\" points=\"" << x << ',' << axis_y << ' ' << x << ',' << y
       << ' ' << tx << ',' << y << "\" fill=\"none\" stroke=\"gray\"/>\n";
    os << "<text class=\"label\" x=\"" << tx << "\" y=\"" << y + 4 << "\" text-anchor=\""
       << (left_side ? "end" : "start") << "\">" << report.classifiers[idx] << " ("
       << internal::FormatDouble(std::round(report.average_ranks[idx] * 1000.0) / 1000.0)
       << ")</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void WriteCdDiagram(const CliqueReport& report, const std::filesystem::path& stem) {
  auto json_path = stem;
  json_path += ".json";
  auto svg_path = stem;
  svg_path += ".svg";
  std::ofstream json_out(json_path);
  std::ofstream svg_out(svg_path);
  if (!json_out || !svg_out) throw Error(ErrorCode::kIo, "cannot write " + stem.string());
  json_out << report.ToJson().dump(2) << '\n';
  svg_out << RenderCdSvg(report);
}

}  // namespace rotforge

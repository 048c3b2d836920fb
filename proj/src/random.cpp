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

#include "rotforge/random.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "rotforge/common.hpp"

namespace rotforge {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kUnsupportedAttribute: return "unsupported attribute";
    case ErrorCode::kMissingValue: return "missing value";
    case ErrorCode::kNonNumeric: return "non-numeric value";
    case ErrorCode::kRaggedRows: return "ragged rows";
    case ErrorCode::kSingleClass: return "single class";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kQuotaExceeded: return "quota exceeds class size";
    case ErrorCode::kNumeric: return "numeric error";
    case ErrorCode::kRankDeficient: return "rank deficient design";
    case ErrorCode::kTooFewObservations: return "too few observations";
    case ErrorCode::kUnfitted: return "model not fitted";
    case ErrorCode::kSchemaMismatch: return "schema mismatch";
    case ErrorCode::kNotFound: return "not found";
    case ErrorCode::kInternal: return "internal error";
  }
  return "unknown error";
}

double CounterRng::Gaussian() {
  double u1 = Uniform();
  while (u1 <= 0.0) u1 = Uniform();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::size_t> CounterRng::SampleWithoutReplacement(std::size_t n,
                                                              std::size_t k) {
  if (k > n) k = n;
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates from the front.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(Below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace rotforge

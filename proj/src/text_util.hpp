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

// Internal text helpers shared by the loaders.

#ifndef ROTFORGE_SRC_TEXT_UTIL_HPP
#define ROTFORGE_SRC_TEXT_UTIL_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rotforge::internal {

std::string_view Trim(std::string_view s);
std::string ToLower(std::string_view s);

// Splits one RFC-4180 style record. Quoted fields may contain the delimiter
// and doubled quotes; single quotes are also honoured when allow_single_quote
// is set (ARFF). Fields are trimmed outside quotes.
std::vector<std::string> SplitRecord(std::string_view line, char delimiter,
                                     bool allow_single_quote = false);

// Strict double parse of the whole token.
std::optional<double> ParseDouble(std::string_view token);

// Shortest round-trippable representation ("%.17g").
std::string FormatDouble(double value);

std::string CsvEscape(std::string_view field);

}  // namespace rotforge::internal

#endif  // ROTFORGE_SRC_TEXT_UTIL_HPP

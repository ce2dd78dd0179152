// Copyright 2026 The flowalert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Small CSV/number helpers shared by the readers and writers.

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flowalert::text {

std::vector<std::string> split_csv_line(std::string_view line);

// Strict: the whole cell must parse and the value must be finite.
std::optional<double> parse_double(std::string_view cell);

// Shortest round-trip representation.
std::string format_double(double v);

std::string_view trim(std::string_view s);

}  // namespace flowalert::text

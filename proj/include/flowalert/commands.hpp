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

#include <string>
#include <string_view>
#include <vector>

namespace flowalert::commands {

struct CommandResult {
  std::vector<std::string> inputs;   // files read
  std::vector<std::string> outputs;  // files written, in a fixed order
  bool crc_infeasible = false;       // run completed with the never-alert rule
  std::string summary;               // JSON
};

/// Runs `simulate`, `run`, `ablate` or `evaluate` from a flat JSON config.
/// Manifests store the same JSON for replay. Unknown keys are rejected with ErrorCode::kConfig.
CommandResult execute(std::string_view command, std::string_view config_json);

/// Keys `execute` accepts for `command`, sorted.
std::vector<std::string> known_keys(std::string_view command);

}  // namespace flowalert::commands

// Copyright 2026 The graspstack Authors
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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace graspstack {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr int kReportVersion = 1;

// Flat metrics keyed by the names documented in docs/metrics.md. Keys are
// kept sorted so reports serialise identically run to run.
struct Report {
  std::string command;
  std::uint64_t seed = 0;
  std::map<std::string, double> metrics;
  nlohmann::json details = nlohmann::json::object();
};

nlohmann::json report_to_json(const Report& r);
// Pretty-printed JSON plus a trailing newline.
std::string report_text(const Report& r);
// Throws std::runtime_error when the file cannot be written.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace graspstack

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

#include "graspstack/report.hpp"

#include <fstream>
#include <stdexcept>

namespace graspstack {

nlohmann::json report_to_json(const Report& r) {
  nlohmann::json j;
  j["report_version"] = kReportVersion;
  j["produced_by"] = "graspstack " + std::string(kVersion);
  j["command"] = r.command;
  j["seed"] = r.seed;
  j["metrics"] = nlohmann::json::object();
  for (const auto& [k, v] : r.metrics) j["metrics"][k] = v;
  if (!r.details.empty()) j["details"] = r.details;
  return j;
}

std::string report_text(const Report& r) { return report_to_json(r).dump(2) + "\n"; }

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace graspstack

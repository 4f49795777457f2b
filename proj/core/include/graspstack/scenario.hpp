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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graspstack/controller.hpp"
#include "graspstack/gesture.hpp"
#include "graspstack/plant.hpp"
#include "graspstack/power.hpp"

namespace graspstack {

inline constexpr int kScenarioVersion = 1;

// Rejected scenario input; `path` is a JSON-pointer-like location such as
// "$.scene[0].class".
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct ScriptedGesture {
  std::int64_t t_ms = 0;
  GestureClass gesture = GestureClass::NoAction;
};

struct ScriptedEvent {
  std::int64_t t_ms = 0;
  std::string kind;
};

enum class GestureSource { Script, Model };

struct NoiseConfig {
  double force_sigma_n = kForceNoiseN;
  double tof_sigma_mm = 1.0;
  double imu_gyro_dps = 5.0;
  double imu_accel_g = 0.02;
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 0;
  std::int64_t duration_ms = 10'000;
  std::int64_t tick_ms = kDefaultTickMs;
  std::int64_t donned_at_ms = 0;
  std::optional<std::int64_t> doffed_at_ms;
  std::vector<SceneObject> scene;
  std::vector<ScriptedGesture> gestures;
  std::vector<ScriptedEvent> events;
  GestureSource gesture_source = GestureSource::Script;
  ControllerConfig controller;
  PlantConfig plant;
  CameraConfig camera;
  NoiseConfig noise;
  PowerProfile power = PowerProfile::defaults();
  BatteryState battery;
};

// Closed-world parse: unknown fields, wrong types, unknown object classes or
// unsorted gesture scripts raise SchemaError.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);
nlohmann::json scenario_to_json(const Scenario& s);

}  // namespace graspstack

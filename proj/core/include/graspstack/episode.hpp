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

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "graspstack/controller.hpp"
#include "graspstack/model.hpp"
#include "graspstack/scenario.hpp"

namespace graspstack {

enum class Outcome : std::uint8_t { Success, Broken, Timeout, Aborted };
std::string_view to_string(Outcome o);

struct EpisodeModels {
  // Used when the scenario asks for model-driven gestures. Quantized graphs run
  // through the integer path.
  std::optional<ModelGraph> gesture;
  // Replaces the canonical object table as the grasp policy when present.
  std::optional<ModelGraph> grasp;
};

struct EpisodeMetrics {
  std::optional<std::int64_t> activation_ms;
  std::optional<std::int64_t> first_frame_ms;
  std::optional<std::int64_t> close_duration_ms;  // Grasp entry -> GraspComplete
  std::optional<std::int64_t> open_duration_ms;   // ReleaseGesture -> HandOpened
  std::optional<std::int64_t> time_to_grasp_ms;   // ActivationGesture -> GraspComplete
  std::int64_t camera_frames = 0;
  std::int64_t camera_ready_ms = 0;  // sim time with the camera able to capture
  double max_grip_force_n = 0.0;     // true plant force, not the sensor reading
  std::optional<double> force_bound_n;  // (max_force + margin) * full scale
  double max_ceiling_excess = 0.0;   // max over ticks of commanded - allowed ceiling
  double energy_mwh = 0.0;
  double battery_start_mwh = 0.0;
  double battery_end_mwh = 0.0;
};

struct TickRecord {
  std::int64_t t_ms = 0;
  ControllerState state = ControllerState::Sleep;
  std::array<double, kActuationGroups> ceiling{};
  std::array<double, kActuationGroups> closure{};
  double max_force_n = 0.0;
  double debit_mwh = 0.0;
};

struct EpisodeResult {
  std::string scenario;
  std::uint64_t seed = 0;
  std::int64_t end_ms = 0;
  std::int64_t tick_ms = 0;
  std::vector<ControllerEvent> events;
  std::vector<std::int64_t> frame_times_ms;
  Outcome outcome = Outcome::Aborted;
  EpisodeMetrics metrics;
  std::vector<TickRecord> trace;  // filled when requested
};

struct EpisodeOptions {
  bool record_trace = false;
};

// Broken if an object broke, else Success if a grasp completed, else Timeout
// if any stage timed out, else Aborted.
Outcome classify_outcome(const std::vector<ControllerEvent>& events);

// Runs the closed loop sensors -> controller -> plant -> power once per tick
// from t = 0 to duration_ms. Validates the scenario first.
EpisodeResult run_episode(const Scenario& scenario, const EpisodeModels& models, std::uint64_t seed,
                          const EpisodeOptions& options = {});

nlohmann::json event_to_json(const ControllerEvent& ev);
nlohmann::json metrics_to_json(const EpisodeMetrics& m);
// JSON lines: one {t_ms, kind, payload} object per event, then the outcome
// record.
void write_episode_log(std::ostream& out, const EpisodeResult& r);
std::string episode_log(const EpisodeResult& r);

}  // namespace graspstack

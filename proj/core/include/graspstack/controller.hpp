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
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "graspstack/controller_state.hpp"
#include "graspstack/detection.hpp"
#include "graspstack/gesture.hpp"
#include "graspstack/grasp.hpp"
#include "graspstack/plant.hpp"

namespace graspstack {

enum class EventKind : std::uint8_t {
  Donned,
  Doffed,
  ActivationGesture,
  CameraReady,
  TargetSelected,
  CorrectionGesture,
  InReach,
  GraspComplete,
  ForceThresholdReached,
  ReleaseGesture,
  ObjectBroken,
  Timeout,
  BatteryLow,
  HandOpened,
  Warning,
};

std::string_view to_string(EventKind k);
std::optional<EventKind> event_kind_from_string(std::string_view name);

struct ControllerEvent {
  std::int64_t t_ms = 0;
  EventKind kind = EventKind::Warning;
  ControllerState from = ControllerState::Sleep;
  ControllerState to = ControllerState::Sleep;
  std::optional<Detection> target;       // TargetSelected, CorrectionGesture
  std::optional<GraspDecision> grasp;    // TargetSelected
  std::optional<std::size_t> group;      // ForceThresholdReached
  std::optional<double> force_n;         // ForceThresholdReached, ObjectBroken
  std::optional<double> distance_mm;     // InReach
  std::string stage;                     // Timeout
  std::string message;                   // Warning
};

struct ControllerConfig {
  std::int64_t camera_init_ms = 300;
  double reach_threshold_mm = 100.0;
  std::int64_t grasp_timeout_ms = 3000;
  std::int64_t detect_timeout_ms = 5000;  // also bounds the approach
  double force_margin = 0.05;             // normalised
  GestureClass activation_gesture = GestureClass::TiltLeft;
  GestureClass release_gesture = GestureClass::TiltRight;
  // Two of these within correction_window_ms reject the current target.
  GestureClass correction_gesture = GestureClass::TiltLeft;
  std::int64_t correction_window_ms = 1000;
  double conf_threshold = kDefaultConfThreshold;
  double nms_iou = kDefaultNmsIou;

  // Throws std::invalid_argument on non-positive values.
  void validate() const;
};

struct ControllerInputs {
  std::int64_t t_ms = 0;
  bool donned = false;
  std::optional<GestureClass> gesture;                 // recognised on this tick
  std::optional<std::vector<Detection>> detections;   // a frame arrived on this tick
  std::optional<double> tof_mm;                        // nullopt: out of range
  std::array<double, kFingers> force_n{};              // measured fingertip forces
  std::array<double, kActuationGroups> closure{};      // servo positions
  bool battery_low = false;
  bool object_broken = false;
  std::vector<std::string> raw_events;                 // scripted events by name
};

struct ControllerOutput {
  ServoCommand servo;
  bool camera_on = false;
  std::vector<ControllerEvent> events;
};

// Groups a grasp pattern drives: every group for power and pronated grips,
// thumb and index/middle for a pinch.
std::array<bool, kActuationGroups> active_groups(GraspPattern p);

using GraspPolicy = std::function<GraspDecision(std::size_t class_id)>;

class Controller {
 public:
  Controller(ControllerConfig cfg, GraspPolicy policy);

  ControllerOutput tick(const ControllerInputs& in);

  ControllerState state() const { return state_; }
  const ControllerConfig& config() const { return cfg_; }
  const std::optional<Detection>& target() const { return target_; }
  const std::optional<GraspDecision>& decision() const { return decision_; }
  // Normalised ceiling currently allowed for the selected object.
  double force_ceiling() const;

 private:
  void enter(ControllerState next, std::int64_t t, ControllerOutput& out, ControllerEvent ev);
  void emit(ControllerOutput& out, ControllerEvent ev) const;
  ControllerEvent make(std::int64_t t, EventKind kind) const;
  void handle_detect(const ControllerInputs& in, ControllerOutput& out);
  void handle_approach(const ControllerInputs& in, ControllerOutput& out);
  void handle_grasp(const ControllerInputs& in, ControllerOutput& out);
  bool correction(const ControllerInputs& in);
  ServoCommand command() const;

  ControllerConfig cfg_;
  GraspPolicy policy_;
  ControllerState state_ = ControllerState::Sleep;
  std::int64_t entered_ms_ = 0;
  std::optional<Detection> target_;
  std::optional<GraspDecision> decision_;
  std::set<int> rejected_;
  std::optional<std::int64_t> last_correction_tilt_;
  bool depleted_ = false;
  std::array<bool, kActuationGroups> stopped_{};
  std::array<double, kActuationGroups> hold_at_{};
};

}  // namespace graspstack

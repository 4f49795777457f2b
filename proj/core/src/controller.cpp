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

#include "graspstack/controller.hpp"

#include <algorithm>
#include <stdexcept>

namespace graspstack {

namespace {

constexpr std::array<std::string_view, 15> kEventNames = {
    "Donned",       "Doffed",         "ActivationGesture",     "CameraReady",
    "TargetSelected", "CorrectionGesture", "InReach",          "GraspComplete",
    "ForceThresholdReached", "ReleaseGesture", "ObjectBroken", "Timeout",
    "BatteryLow",   "HandOpened",     "Warning"};

constexpr std::array<std::string_view, kControllerStates> kStateNames = {
    "Sleep", "Idle", "CameraInit", "Detect", "Approach", "Grasp", "Hold", "Release"};

constexpr double kClosedEps = 1e-9;

}  // namespace

std::string_view to_string(ControllerState s) { return kStateNames.at(static_cast<std::size_t>(s)); }

std::optional<ControllerState> controller_state_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kStateNames.size(); ++i) {
    if (kStateNames[i] == name) return static_cast<ControllerState>(i);
  }
  return std::nullopt;
}

std::string_view to_string(EventKind k) { return kEventNames.at(static_cast<std::size_t>(k)); }

std::optional<EventKind> event_kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kEventNames.size(); ++i) {
    if (kEventNames[i] == name) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

void ControllerConfig::validate() const {
  auto positive = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("controller config: ") + what + " must be positive");
  };
  positive(camera_init_ms > 0, "camera_init_ms");
  positive(reach_threshold_mm > 0.0, "reach_threshold_mm");
  positive(grasp_timeout_ms > 0, "grasp_timeout_ms");
  positive(detect_timeout_ms > 0, "detect_timeout_ms");
  positive(force_margin > 0.0, "force_margin");
  positive(correction_window_ms > 0, "correction_window_ms");
  if (conf_threshold < 0.0 || conf_threshold > 1.0) {
    throw std::invalid_argument("controller config: conf_threshold must be in [0, 1]");
  }
  if (nms_iou <= 0.0 || nms_iou > 1.0) {
    throw std::invalid_argument("controller config: nms_iou must be in (0, 1]");
  }
}

std::array<bool, kActuationGroups> active_groups(GraspPattern p) {
  if (p == GraspPattern::Pinch) return {true, true, false};
  return {true, true, true};
}

Controller::Controller(ControllerConfig cfg, GraspPolicy policy)
    : cfg_(cfg), policy_(std::move(policy)) {
  cfg_.validate();
  if (!policy_) throw std::invalid_argument("controller needs a grasp policy");
}

double Controller::force_ceiling() const {
  if (!decision_) return 0.0;
  return std::min(decision_->max_force + cfg_.force_margin, 1.0);
}

ControllerEvent Controller::make(std::int64_t t, EventKind kind) const {
  ControllerEvent ev;
  ev.t_ms = t;
  ev.kind = kind;
  ev.from = state_;
  ev.to = state_;
  return ev;
}

void Controller::emit(ControllerOutput& out, ControllerEvent ev) const { out.events.push_back(std::move(ev)); }

void Controller::enter(ControllerState next, std::int64_t t, ControllerOutput& out, ControllerEvent ev) {
  ev.from = state_;
  ev.to = next;
  state_ = next;
  entered_ms_ = t;
  if (next == ControllerState::Sleep || next == ControllerState::Idle) {
    target_.reset();
    decision_.reset();
    rejected_.clear();
  }
  if (next == ControllerState::CameraInit) last_correction_tilt_.reset();
  if (next == ControllerState::Grasp) {
    const auto active = active_groups(decision_ ? decision_->pattern : GraspPattern::PowerGrip);
    for (std::size_t g = 0; g < kActuationGroups; ++g) stopped_[g] = !active[g];
    hold_at_.fill(0.0);
  }
  out.events.push_back(std::move(ev));
}

bool Controller::correction(const ControllerInputs& in) {
  if (in.gesture != cfg_.correction_gesture) return false;
  if (last_correction_tilt_ && in.t_ms - *last_correction_tilt_ <= cfg_.correction_window_ms) {
    last_correction_tilt_.reset();
    return true;
  }
  last_correction_tilt_ = in.t_ms;
  return false;
}

void Controller::handle_detect(const ControllerInputs& in, ControllerOutput& out) {
  if (correction(in)) {
    ControllerEvent ev = make(in.t_ms, EventKind::CorrectionGesture);
    ev.target = target_;
    emit(out, std::move(ev));
  }
  if (in.detections) {
    std::vector<Detection> dets;
    for (const Detection& d : *in.detections) {
      if (d.confidence >= cfg_.conf_threshold && !rejected_.contains(d.id)) dets.push_back(d);
    }
    dets = nms(std::move(dets), cfg_.nms_iou);
    if (auto pick = select_target(dets)) {
      target_ = pick;
      decision_ = policy_(pick->class_id);
      ControllerEvent ev = make(in.t_ms, EventKind::TargetSelected);
      ev.target = target_;
      ev.grasp = decision_;
      enter(ControllerState::Approach, in.t_ms, out, std::move(ev));
      return;
    }
  }
  if (in.t_ms - entered_ms_ >= cfg_.detect_timeout_ms) {
    ControllerEvent ev = make(in.t_ms, EventKind::Timeout);
    ev.stage = "detect";
    enter(ControllerState::Idle, in.t_ms, out, std::move(ev));
  }
}

void Controller::handle_approach(const ControllerInputs& in, ControllerOutput& out) {
  if (correction(in)) {
    ControllerEvent ev = make(in.t_ms, EventKind::CorrectionGesture);
    ev.target = target_;
    if (target_) rejected_.insert(target_->id);
    target_.reset();
    decision_.reset();
    enter(ControllerState::Detect, in.t_ms, out, std::move(ev));
    return;
  }
  if (in.tof_mm && *in.tof_mm <= cfg_.reach_threshold_mm) {
    ControllerEvent ev = make(in.t_ms, EventKind::InReach);
    ev.distance_mm = in.tof_mm;
    enter(ControllerState::Grasp, in.t_ms, out, std::move(ev));
    return;
  }
  if (in.t_ms - entered_ms_ >= cfg_.detect_timeout_ms) {
    ControllerEvent ev = make(in.t_ms, EventKind::Timeout);
    ev.stage = "approach";
    enter(ControllerState::Idle, in.t_ms, out, std::move(ev));
  }
}

void Controller::handle_grasp(const ControllerInputs& in, ControllerOutput& out) {
  const double threshold_n = (decision_ ? decision_->max_force : 0.0) * kFullScaleForceN;
  for (std::size_t g = 0; g < kActuationGroups; ++g) {
    if (stopped_[g]) continue;
    double force = 0.0;
    for (std::size_t f = 0; f < kFingers; ++f) {
      if (group_of_finger(f) == g) force = std::max(force, in.force_n[f]);
    }
    if (force >= threshold_n) {
      stopped_[g] = true;
      hold_at_[g] = in.closure[g];
      ControllerEvent ev = make(in.t_ms, EventKind::ForceThresholdReached);
      ev.group = g;
      ev.force_n = force;
      emit(out, std::move(ev));
    } else if (in.closure[g] >= 1.0 - kClosedEps) {
      stopped_[g] = true;
      hold_at_[g] = 1.0;
    }
  }
  if (std::all_of(stopped_.begin(), stopped_.end(), [](bool s) { return s; })) {
    enter(ControllerState::Hold, in.t_ms, out, make(in.t_ms, EventKind::GraspComplete));
    return;
  }
  if (in.t_ms - entered_ms_ >= cfg_.grasp_timeout_ms) {
    ControllerEvent ev = make(in.t_ms, EventKind::Timeout);
    ev.stage = "grasp";
    enter(ControllerState::Idle, in.t_ms, out, std::move(ev));
  }
}

ServoCommand Controller::command() const {
  ServoCommand cmd = ServoCommand::open();
  if (state_ != ControllerState::Grasp && state_ != ControllerState::Hold) return cmd;
  const double ceiling = force_ceiling();
  const auto active = active_groups(decision_ ? decision_->pattern : GraspPattern::PowerGrip);
  for (std::size_t g = 0; g < kActuationGroups; ++g) {
    if (!active[g]) continue;
    cmd.force_ceiling[g] = ceiling;
    cmd.target[g] = stopped_[g] ? hold_at_[g] : 1.0;
  }
  return cmd;
}

ControllerOutput Controller::tick(const ControllerInputs& in) {
  ControllerOutput out;
  bool doffed = !in.donned;
  bool battery_low = in.battery_low;
  for (const std::string& raw : in.raw_events) {
    const auto kind = event_kind_from_string(raw);
    if (kind == EventKind::Doffed) {
      doffed = true;
    } else if (kind == EventKind::BatteryLow) {
      battery_low = true;
    } else {
      ControllerEvent ev = make(in.t_ms, EventKind::Warning);
      ev.message = "ignored input event '" + raw + "'";
      emit(out, std::move(ev));
    }
  }
  if (battery_low) depleted_ = true;

  if (state_ != ControllerState::Sleep && doffed) {
    enter(ControllerState::Sleep, in.t_ms, out, make(in.t_ms, EventKind::Doffed));
  } else if (state_ != ControllerState::Sleep && battery_low) {
    enter(ControllerState::Sleep, in.t_ms, out, make(in.t_ms, EventKind::BatteryLow));
  } else if (in.object_broken &&
             (state_ == ControllerState::Grasp || state_ == ControllerState::Hold)) {
    ControllerEvent ev = make(in.t_ms, EventKind::ObjectBroken);
    ev.force_n = *std::max_element(in.force_n.begin(), in.force_n.end());
    enter(ControllerState::Release, in.t_ms, out, std::move(ev));
  } else {
    switch (state_) {
      case ControllerState::Sleep:
        if (!doffed && !depleted_) enter(ControllerState::Idle, in.t_ms, out, make(in.t_ms, EventKind::Donned));
        break;
      case ControllerState::Idle:
        if (in.gesture == cfg_.activation_gesture) {
          enter(ControllerState::CameraInit, in.t_ms, out, make(in.t_ms, EventKind::ActivationGesture));
        }
        break;
      case ControllerState::CameraInit:
        if (in.t_ms - entered_ms_ >= cfg_.camera_init_ms) {
          enter(ControllerState::Detect, in.t_ms, out, make(in.t_ms, EventKind::CameraReady));
          handle_detect(in, out);
        }
        break;
      case ControllerState::Detect: handle_detect(in, out); break;
      case ControllerState::Approach: handle_approach(in, out); break;
      case ControllerState::Grasp: handle_grasp(in, out); break;
      case ControllerState::Hold:
        if (in.gesture == cfg_.release_gesture) {
          enter(ControllerState::Release, in.t_ms, out, make(in.t_ms, EventKind::ReleaseGesture));
        }
        break;
      case ControllerState::Release:
        if (std::all_of(in.closure.begin(), in.closure.end(), [](double c) { return c <= kClosedEps; })) {
          enter(ControllerState::Idle, in.t_ms, out, make(in.t_ms, EventKind::HandOpened));
        }
        break;
    }
  }
  out.servo = command();
  out.camera_on = state_ == ControllerState::CameraInit || state_ == ControllerState::Detect ||
                  state_ == ControllerState::Approach;
  return out;
}

}  // namespace graspstack

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

#include "graspstack/power.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace graspstack {

namespace {

constexpr std::array<std::string_view, kModules> kModuleNames = {
    "camera", "fpga-core", "imu", "tof", "force-sensors", "servo-thumb", "servo-index", "servo-ring"};

constexpr double kMsPerHour = 3'600'000.0;

void check_fractions(double sum) {
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("duty fractions sum to " + std::to_string(sum) + ", expected 1");
  }
}

}  // namespace

std::string_view to_string(PowerMode m) {
  switch (m) {
    case PowerMode::Sleep: return "sleep";
    case PowerMode::Idle: return "idle";
    case PowerMode::Active: return "active";
  }
  return "?";
}

std::string_view module_name(Module m) { return kModuleNames.at(static_cast<std::size_t>(m)); }

std::optional<Module> module_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kModules; ++i) {
    if (kModuleNames[i] == name) return static_cast<Module>(i);
  }
  return std::nullopt;
}

double ModuleDraw::at(PowerMode m) const {
  switch (m) {
    case PowerMode::Sleep: return sleep_mw;
    case PowerMode::Idle: return idle_mw;
    case PowerMode::Active: return active_mw;
  }
  return 0.0;
}

PowerProfile PowerProfile::defaults() {
  PowerProfile p;
  auto set = [&p](Module m, ModuleDraw d) { p.draw[static_cast<std::size_t>(m)] = d; };
  // gated off entirely outside the vision states
  set(Module::Camera, {0.0, 120.0, 750.0});
  set(Module::FpgaCore, {5.0, 600.0, 2500.0});
  set(Module::Imu, {0.5, 3.0, 10.0});
  set(Module::Tof, {0.5, 5.0, 60.0});
  set(Module::ForceSensors, {0.5, 5.0, 25.0});
  set(Module::Servo0, {5.0, 50.0, 2000.0});
  set(Module::Servo1, {5.0, 50.0, 2000.0});
  set(Module::Servo2, {5.0, 50.0, 2000.0});
  return p;
}

void PowerProfile::validate() const {
  for (std::size_t i = 0; i < kModules; ++i) {
    const ModuleDraw& d = draw[i];
    const bool finite = std::isfinite(d.sleep_mw) && std::isfinite(d.idle_mw) && std::isfinite(d.active_mw);
    if (!finite || d.sleep_mw < 0.0 || d.sleep_mw > d.idle_mw || d.idle_mw > d.active_mw) {
      throw std::invalid_argument("power profile for " + std::string(kModuleNames[i]) +
                                  " must satisfy 0 <= sleep <= idle <= active");
    }
  }
}

double PowerProfile::total_mw(const ModuleStates& states) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < kModules; ++i) sum += draw[i].at(states[i]);
  return sum;
}

BatteryState BatteryState::full(double voltage, double capacity_mah) {
  return BatteryState{voltage, capacity_mah, voltage * capacity_mah};
}

PowerStepResult power_step(const BatteryState& battery, const PowerProfile& profile,
                           const ModuleStates& states, double dt_ms) {
  if (!(dt_ms > 0.0)) throw std::invalid_argument("power_step needs dt > 0");
  PowerStepResult r;
  r.battery = battery;
  const double want = profile.total_mw(states) * dt_ms / kMsPerHour;
  r.debit_mwh = std::min(want, battery.remaining_mwh);
  r.battery.remaining_mwh = battery.remaining_mwh - r.debit_mwh;
  const double low = kBatteryLowFraction * battery.capacity_mwh();
  r.battery_low = battery.remaining_mwh > low && r.battery.remaining_mwh <= low;
  return r;
}

ModuleStates module_states_for(ControllerState s) {
  using P = PowerMode;
  // camera, fpga, imu, tof, force, servo x3
  switch (s) {
    case ControllerState::Sleep: return {P::Sleep, P::Sleep, P::Sleep, P::Sleep, P::Sleep, P::Sleep, P::Sleep, P::Sleep};
    case ControllerState::Idle: return {P::Sleep, P::Idle, P::Active, P::Sleep, P::Sleep, P::Idle, P::Idle, P::Idle};
    case ControllerState::CameraInit: return {P::Active, P::Active, P::Active, P::Idle, P::Sleep, P::Idle, P::Idle, P::Idle};
    case ControllerState::Detect: return {P::Active, P::Active, P::Active, P::Idle, P::Sleep, P::Idle, P::Idle, P::Idle};
    case ControllerState::Approach: return {P::Active, P::Active, P::Active, P::Active, P::Idle, P::Idle, P::Idle, P::Idle};
    case ControllerState::Grasp: return {P::Sleep, P::Idle, P::Active, P::Idle, P::Active, P::Active, P::Active, P::Active};
    case ControllerState::Hold: return {P::Sleep, P::Idle, P::Active, P::Sleep, P::Active, P::Active, P::Active, P::Active};
    case ControllerState::Release: return {P::Sleep, P::Idle, P::Active, P::Sleep, P::Idle, P::Active, P::Active, P::Active};
  }
  return {};
}

double estimate_runtime(const BatteryState& battery, std::span<const DutyPhase> duty) {
  double sum = 0.0;
  double mean_ma = 0.0;
  for (const DutyPhase& d : duty) {
    if (d.fraction < 0.0 || d.current_ma < 0.0) throw std::invalid_argument("negative duty entry");
    sum += d.fraction;
    mean_ma += d.fraction * d.current_ma;
  }
  check_fractions(sum);
  if (mean_ma == 0.0) return std::numeric_limits<double>::infinity();
  return battery.capacity_mah / mean_ma;
}

double estimate_runtime(const BatteryState& battery, const PowerProfile& profile,
                        std::span<const DutyStates> duty) {
  double sum = 0.0;
  double mean_mw = 0.0;
  for (const DutyStates& d : duty) {
    if (d.fraction < 0.0) throw std::invalid_argument("negative duty fraction");
    sum += d.fraction;
    mean_mw += d.fraction * profile.total_mw(d.states);
  }
  check_fractions(sum);
  if (mean_mw == 0.0) return std::numeric_limits<double>::infinity();
  return battery.capacity_mwh() / mean_mw;
}

}  // namespace graspstack

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
#include <optional>
#include <span>
#include <string_view>

#include "graspstack/controller_state.hpp"

namespace graspstack {

enum class PowerMode : std::uint8_t { Sleep, Idle, Active };
std::string_view to_string(PowerMode m);

enum class Module : std::uint8_t { Camera, FpgaCore, Imu, Tof, ForceSensors, Servo0, Servo1, Servo2 };
inline constexpr std::size_t kModules = 8;
std::string_view module_name(Module m);
std::optional<Module> module_from_name(std::string_view name);

using ModuleStates = std::array<PowerMode, kModules>;

struct ModuleDraw {
  double sleep_mw = 0.0;
  double idle_mw = 0.0;
  double active_mw = 0.0;
  double at(PowerMode m) const;
};

struct PowerProfile {
  std::array<ModuleDraw, kModules> draw{};

  // Illustrative fixtures, not measurements.
  static PowerProfile defaults();
  // Throws std::invalid_argument unless 0 <= sleep <= idle <= active for
  // every module.
  void validate() const;
  double total_mw(const ModuleStates& states) const;
};

inline constexpr double kBatteryLowFraction = 0.05;

struct BatteryState {
  double nominal_voltage = 11.1;
  double capacity_mah = 1300.0;
  double remaining_mwh = 11.1 * 1300.0;

  double capacity_mwh() const { return nominal_voltage * capacity_mah; }
  double fraction() const { return remaining_mwh / capacity_mwh(); }
  static BatteryState full(double voltage = 11.1, double capacity_mah = 1300.0);
};

struct PowerStepResult {
  BatteryState battery;
  double debit_mwh = 0.0;
  bool battery_low = false;  // crossed kBatteryLowFraction on this step
};

// remaining -= total_mw * dt / 3.6e6, floored at zero. Throws on dt <= 0.
PowerStepResult power_step(const BatteryState& battery, const PowerProfile& profile,
                           const ModuleStates& states, double dt_ms);

// Which modules are awake in each controller state. The camera sleeps in
// Sleep and Idle.
ModuleStates module_states_for(ControllerState s);

struct DutyPhase {
  double fraction = 1.0;
  double current_ma = 0.0;
};

// Hours until empty: capacity_mah / duty-weighted mean current. Zero draw
// returns +infinity. Throws unless fractions are >= 0 and sum to 1 (1e-9).
double estimate_runtime(const BatteryState& battery, std::span<const DutyPhase> duty);

struct DutyStates {
  double fraction = 1.0;
  ModuleStates states{};
};
double estimate_runtime(const BatteryState& battery, const PowerProfile& profile,
                        std::span<const DutyStates> duty);

}  // namespace graspstack

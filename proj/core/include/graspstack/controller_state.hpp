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
#include <optional>
#include <string_view>

namespace graspstack {

enum class ControllerState : std::uint8_t {
  Sleep,
  Idle,
  CameraInit,
  Detect,
  Approach,
  Grasp,
  Hold,
  Release,
};

inline constexpr std::size_t kControllerStates = 8;

std::string_view to_string(ControllerState s);
std::optional<ControllerState> controller_state_from_string(std::string_view name);

}  // namespace graspstack

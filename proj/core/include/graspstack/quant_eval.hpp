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

#include <cstddef>
#include <vector>

#include "graspstack/gesture.hpp"
#include "graspstack/grasp.hpp"

namespace graspstack {

struct Agreement {
  std::size_t total = 0;
  std::size_t agree = 0;
  double max_force_diff = 0.0;  // grasp models only, normalised
  double rate() const { return total == 0 ? 0.0 : static_cast<double>(agree) / static_cast<double>(total); }
};

// Calibrates activation ranges on the given windows (or every object id) and
// attaches INT8 parameters in place.
void quantize_gesture_model(ModelGraph& model, const std::vector<GestureWindow>& calibration);
void quantize_grasp_model(ModelGraph& model, std::size_t num_classes = kObjectClasses);

// Float argmax vs integer argmax of one quantized model.
Agreement gesture_int8_agreement(const ModelGraph& model, const std::vector<GestureWindow>& windows);
Agreement grasp_int8_agreement(const ModelGraph& model, const std::vector<GraspSample>& samples,
                               std::size_t num_classes = kObjectClasses);

}  // namespace graspstack

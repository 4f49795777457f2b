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

#include "graspstack/quant_eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "graspstack/quantized_model.hpp"

namespace graspstack {

void quantize_gesture_model(ModelGraph& model, const std::vector<GestureWindow>& calibration) {
  std::vector<Tensor> inputs;
  inputs.reserve(calibration.size());
  for (const GestureWindow& w : calibration) inputs.push_back(gesture_input(w));
  quantize_model(model, inputs);
}

void quantize_grasp_model(ModelGraph& model, std::size_t num_classes) {
  std::vector<Tensor> inputs;
  for (std::size_t id = 0; id < num_classes; ++id) inputs.push_back(grasp_input(id, num_classes));
  quantize_model(model, inputs);
}

Agreement gesture_int8_agreement(const ModelGraph& model, const std::vector<GestureWindow>& windows) {
  if (!is_quantized(model)) throw std::invalid_argument("model '" + model.name + "' is not quantized");
  Agreement a;
  for (const GestureWindow& w : windows) {
    ++a.total;
    if (infer_gesture(model, w).cls == infer_gesture_int8(model, w).cls) ++a.agree;
  }
  return a;
}

Agreement grasp_int8_agreement(const ModelGraph& model, const std::vector<GraspSample>& samples,
                               std::size_t num_classes) {
  if (!is_quantized(model)) throw std::invalid_argument("model '" + model.name + "' is not quantized");
  Agreement a;
  for (const GraspSample& s : samples) {
    const GraspDecision f = infer_grasp_force(model, s.object_id, num_classes);
    const GraspDecision q = infer_grasp_force_int8(model, s.object_id, num_classes);
    ++a.total;
    if (f.pattern == q.pattern) ++a.agree;
    a.max_force_diff = std::max(a.max_force_diff, std::abs(f.max_force - q.max_force));
  }
  return a;
}

}  // namespace graspstack

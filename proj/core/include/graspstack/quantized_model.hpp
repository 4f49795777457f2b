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

#include <span>
#include <vector>

#include "graspstack/model.hpp"

namespace graspstack {

// Attaches INT8 weights and per-layer activation exponents to every conv and
// dense layer. Activation ranges are calibrated on the float forward pass of
// `calibration` (samples or batches shaped for the model).
void quantize_model(ModelGraph& model, std::span<const Tensor> calibration);
bool is_quantized(const ModelGraph& model);

// Integer inference of a quantized model on one sample: int8 activations,
// int32 accumulation, power-of-two requantization. Softmax heads are
// evaluated on the dequantized logits; linear heads are dequantized.
std::vector<Tensor> forward_int8(const ModelGraph& model, const Tensor& sample);

}  // namespace graspstack

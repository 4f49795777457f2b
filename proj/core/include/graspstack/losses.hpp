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
#include <span>

#include "graspstack/tensor.hpp"

namespace graspstack {

inline constexpr double kProbabilityFloor = 1e-12;

// -ln(pred[label]) with pred floored at 1e-12. `pred` must be a probability
// vector (sums to 1 within 1e-4).
double cross_entropy(const Tensor& pred, std::size_t label);
double mae(const Tensor& pred, const Tensor& target);

// Batched forms over B x N predictions; both return the batch mean and write
// dLoss/dpred into `grad` (same shape as pred).
double cross_entropy_batch(const Tensor& pred, std::span<const std::size_t> labels, Tensor* grad);
double mae_batch(const Tensor& pred, const Tensor& target, Tensor* grad);

}  // namespace graspstack

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
#include <span>
#include <vector>

#include "graspstack/tensor.hpp"

namespace graspstack {

inline constexpr int kQuantBits = 8;
inline constexpr int kQuantMin = -128;
inline constexpr int kQuantMax = 127;
// Scale returned by calibrate_quant when every sample is zero.
inline constexpr int kDefaultQuantExponent = -7;

// Symmetric per-tensor INT8 parameters. The scale is always 2^exponent and
// the zero point is always 0.
class QuantParams {
 public:
  // Throws std::invalid_argument unless `scale` is a positive power of two.
  explicit QuantParams(double scale);
  static QuantParams from_exponent(int exponent);

  double scale() const;
  int exponent() const { return exponent_; }
  static constexpr int bit_width() { return kQuantBits; }
  static constexpr int zero_point() { return 0; }

  friend bool operator==(const QuantParams&, const QuantParams&) = default;

 private:
  QuantParams() = default;
  int exponent_ = 0;
};

struct QuantTensor {
  Shape shape;
  std::vector<std::int8_t> data;
  QuantParams params = QuantParams::from_exponent(0);
};

// Round half away from zero, the only rounding mode used for quantization.
double round_half_away(double x);

// Integer division by 2^shift with round-half-away, or multiplication when
// shift is negative. Result is saturated to int8.
std::int8_t requantize(std::int64_t acc, int shift);

QuantTensor quantize(const Tensor& t, const QuantParams& p);
Tensor dequantize(const QuantTensor& q);
// quantize followed by dequantize, used for fake-quantization during training.
Tensor fake_quantize(const Tensor& t, const QuantParams& p);

// Smallest power-of-two scale s with 127 * s >= max |x| over all samples.
QuantParams calibrate_quant(std::span<const Tensor> samples);
QuantParams calibrate_quant(const Tensor& sample);
QuantParams calibrate_abs_max(double max_abs);

}  // namespace graspstack

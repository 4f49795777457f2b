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

#include "graspstack/quant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace graspstack {

QuantParams::QuantParams(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("quantization scale must be positive and finite");
  }
  int exp = 0;
  const double mantissa = std::frexp(scale, &exp);
  if (mantissa != 0.5) {
    throw std::invalid_argument("quantization scale " + std::to_string(scale) +
                                " is not a power of two");
  }
  exponent_ = exp - 1;
}

QuantParams QuantParams::from_exponent(int exponent) {
  QuantParams p;
  p.exponent_ = exponent;
  return p;
}

double QuantParams::scale() const { return std::ldexp(1.0, exponent_); }

double round_half_away(double x) { return std::round(x); }

std::int8_t requantize(std::int64_t acc, int shift) {
  std::int64_t v;
  if (shift <= 0) {
    const int up = -shift;
    if (up >= 32) {
      v = acc == 0 ? 0 : (acc > 0 ? kQuantMax : kQuantMin);
    } else {
      v = acc * (std::int64_t{1} << up);
    }
  } else if (shift >= 62) {
    v = 0;
  } else {
    const std::int64_t half = std::int64_t{1} << (shift - 1);
    const std::int64_t mag = acc < 0 ? -acc : acc;
    const std::int64_t q = (mag + half) >> shift;
    v = acc < 0 ? -q : q;
  }
  return static_cast<std::int8_t>(std::clamp<std::int64_t>(v, kQuantMin, kQuantMax));
}

QuantTensor quantize(const Tensor& t, const QuantParams& p) {
  QuantTensor q{t.shape(), std::vector<std::int8_t>(t.size()), p};
  const double inv = 1.0 / p.scale();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = round_half_away(t[i] * inv);
    q.data[i] = static_cast<std::int8_t>(std::clamp(r, double{kQuantMin}, double{kQuantMax}));
  }
  return q;
}

Tensor dequantize(const QuantTensor& q) {
  std::vector<double> v(q.data.size());
  const double s = q.params.scale();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = q.data[i] * s;
  return Tensor(q.shape, std::move(v));
}

Tensor fake_quantize(const Tensor& t, const QuantParams& p) { return dequantize(quantize(t, p)); }

QuantParams calibrate_abs_max(double max_abs) {
  if (!std::isfinite(max_abs)) throw std::invalid_argument("calibration sample is not finite");
  if (max_abs <= 0.0) return QuantParams::from_exponent(kDefaultQuantExponent);
  int k = static_cast<int>(std::ceil(std::log2(max_abs / kQuantMax)));
  while (kQuantMax * std::ldexp(1.0, k - 1) >= max_abs) --k;
  while (kQuantMax * std::ldexp(1.0, k) < max_abs) ++k;
  return QuantParams::from_exponent(k);
}

QuantParams calibrate_quant(std::span<const Tensor> samples) {
  if (samples.empty()) throw std::invalid_argument("calibrate_quant needs at least one sample");
  double m = 0.0;
  for (const Tensor& s : samples) {
    for (double v : s.data()) {
      if (!std::isfinite(v)) throw std::invalid_argument("calibration sample is not finite");
      m = std::max(m, std::abs(v));
    }
  }
  return calibrate_abs_max(m);
}

QuantParams calibrate_quant(const Tensor& sample) {
  return calibrate_quant(std::span<const Tensor>(&sample, 1));
}

}  // namespace graspstack

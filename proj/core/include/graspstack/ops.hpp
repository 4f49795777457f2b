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

#include "graspstack/tensor.hpp"

namespace graspstack {

enum class Padding { Valid, Same };

struct Conv2DSpec {
  std::array<std::size_t, 2> stride{1, 1};
  Padding padding = Padding::Valid;
};

// Arithmetic used inside the convolution GEMMs. Tensors stay double either
// way; Single casts the unrolled patches and kernels to float, which roughly
// halves training time at ~1e-6 relative error. The setting is per thread.
enum class ConvPrecision { Double, Single };
ConvPrecision conv_precision();
class ScopedConvPrecision {
 public:
  explicit ScopedConvPrecision(ConvPrecision p);
  ~ScopedConvPrecision();
  ScopedConvPrecision(const ScopedConvPrecision&) = delete;
  ScopedConvPrecision& operator=(const ScopedConvPrecision&) = delete;

 private:
  ConvPrecision prev_;
};

// Output spatial extent of a convolution along one axis.
std::size_t conv_out_dim(std::size_t in, std::size_t kernel, std::size_t stride, Padding padding);

// Forward kernels. Each accepts either a single sample (H x W x C, or N for
// dense) or a batch with a leading batch axis (B x H x W x C, or B x N); the
// result has the same batching as the input.

// Cross-correlation with kernels laid out kh x kw x C x F.
Tensor conv2d(const Tensor& input, const Tensor& kernels, const Tensor& bias,
              const Conv2DSpec& spec = {});
Tensor dense(const Tensor& input, const Tensor& weights, const Tensor& bias);
Tensor relu(const Tensor& input);
// Row-wise softmax over the last axis.
Tensor softmax(const Tensor& logits);
// Non-overlapping windows; trailing rows/columns that do not fill a window
// are dropped (floor arithmetic).
Tensor max_pool2d(const Tensor& input, std::array<std::size_t, 2> window);
Tensor global_avg_pool(const Tensor& input);

// Reverse-mode counterparts. `grad_out` has the shape of the forward output.
struct Conv2DGrads {
  Tensor input;  // empty when not requested
  Tensor kernels;
  Tensor bias;
};
Conv2DGrads conv2d_backward(const Tensor& input, const Tensor& kernels,
                            const Conv2DSpec& spec, const Tensor& grad_out,
                            bool want_input_grad = true);

struct DenseGrads {
  Tensor input;
  Tensor weights;
  Tensor bias;
};
DenseGrads dense_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_out,
                          bool want_input_grad = true);

Tensor relu_backward(const Tensor& input, const Tensor& grad_out);
Tensor softmax_backward(const Tensor& output, const Tensor& grad_out);
Tensor max_pool2d_backward(const Tensor& input, std::array<std::size_t, 2> window,
                           const Tensor& grad_out);
Tensor global_avg_pool_backward(const Tensor& input, const Tensor& grad_out);

}  // namespace graspstack

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

#include "graspstack/losses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace graspstack {

double cross_entropy(const Tensor& pred, std::size_t label) {
  if (pred.rank() != 1 || pred.empty()) throw ShapeError("cross_entropy: pred must be a vector");
  if (label >= pred.size()) {
    throw std::out_of_range("cross_entropy: label " + std::to_string(label) +
                            " outside [0, " + std::to_string(pred.size()) + ")");
  }
  double sum = 0.0;
  for (double p : pred.data()) sum += p;
  if (std::abs(sum - 1.0) > 1e-4) {
    throw std::invalid_argument("cross_entropy: probabilities sum to " + std::to_string(sum));
  }
  return -std::log(std::max(pred[label], kProbabilityFloor));
}

double mae(const Tensor& pred, const Tensor& target) {
  if (pred.shape() != target.shape()) {
    throw ShapeError("mae: " + shape_str(pred.shape()) + " vs " + shape_str(target.shape()));
  }
  if (pred.empty()) throw ShapeError("mae: empty tensor");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - target[i]);
  return s / static_cast<double>(pred.size());
}

double cross_entropy_batch(const Tensor& pred, std::span<const std::size_t> labels, Tensor* grad) {
  if (pred.rank() != 2 || pred.dim(0) != labels.size()) {
    throw ShapeError("cross_entropy_batch: pred " + shape_str(pred.shape()) + " vs " +
                     std::to_string(labels.size()) + " labels");
  }
  const std::size_t b = pred.dim(0), n = pred.dim(1);
  if (grad) *grad = Tensor(pred.shape());
  double total = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    if (labels[i] >= n) {
      throw std::out_of_range("cross_entropy_batch: label " + std::to_string(labels[i]) +
                              " outside [0, " + std::to_string(n) + ")");
    }
    const double p = pred[i * n + labels[i]];
    total += -std::log(std::max(p, kProbabilityFloor));
    if (grad && p > kProbabilityFloor) (*grad)[i * n + labels[i]] = -1.0 / (p * b);
  }
  return total / static_cast<double>(b);
}

double mae_batch(const Tensor& pred, const Tensor& target, Tensor* grad) {
  if (pred.shape() != target.shape()) {
    throw ShapeError("mae_batch: " + shape_str(pred.shape()) + " vs " + shape_str(target.shape()));
  }
  const double count = static_cast<double>(pred.size());
  if (grad) *grad = Tensor(pred.shape());
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    s += std::abs(d);
    if (grad) (*grad)[i] = d > 0.0 ? 1.0 / count : (d < 0.0 ? -1.0 / count : 0.0);
  }
  return s / count;
}

}  // namespace graspstack

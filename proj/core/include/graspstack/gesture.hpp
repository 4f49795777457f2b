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
#include <string_view>
#include <vector>

#include "graspstack/model.hpp"
#include "graspstack/ops.hpp"
#include "graspstack/tensor.hpp"

namespace graspstack {

enum class GestureClass : std::uint8_t { TiltRight = 0, TiltLeft = 1, NoAction = 2 };
inline constexpr std::size_t kGestureClasses = 3;

std::string_view to_string(GestureClass g);
std::optional<GestureClass> gesture_from_string(std::string_view name);

inline constexpr std::size_t kImuChannels = 6;  // ax ay az [g], gx gy gz [deg/s]
inline constexpr double kImuRateHz = 30.0;
inline constexpr std::size_t kDefaultWindowLength = 60;  // 2 s at 30 Hz
// Full-scale ranges used to normalise raw IMU readings before inference.
inline constexpr double kAccelFullScaleG = 2.0;
inline constexpr double kGyroFullScaleDps = 250.0;

struct GestureWindow {
  Tensor samples;  // T x 6
  std::optional<GestureClass> label;
  double sample_rate_hz = kImuRateHz;

  std::size_t length() const { return samples.empty() ? 0 : samples.dim(0); }
};

// T x 6 x 1 network input with every channel divided by its full-scale range.
Tensor gesture_input(const GestureWindow& w);

// Shortest window the conv/pool stack accepts.
std::size_t min_gesture_window();

// conv(5x2,32)+relu, conv(3x2,64)+relu, conv(3x2,128)+relu, maxpool(2x1),
// dropout, flatten, dropout, dense(128)+relu, dropout, dense(3)+softmax.
ModelGraph build_gesture_cnn(std::size_t window_len = kDefaultWindowLength,
                             std::size_t channels = kImuChannels, double dropout_rate = 0.3);

struct GestureTrainConfig {
  std::size_t epochs = 300;
  double lr = 0.001;
  std::size_t batch = 32;
  std::uint64_t seed = 1;
  bool qat = false;
  ConvPrecision precision = ConvPrecision::Single;
};

using ConfusionMatrix = std::array<std::array<std::size_t, kGestureClasses>, kGestureClasses>;

struct GestureMetrics {
  double train_acc = 0.0;
  double test_acc = 0.0;
  double val_acc = 0.0;
  ConfusionMatrix confusion{};  // [true][predicted] on the test split
  std::size_t train_size = 0, test_size = 0, val_size = 0;
  double final_loss = 0.0;
};

struct GestureTrainResult {
  ModelGraph model;
  GestureMetrics metrics;
  std::vector<std::size_t> test_indices;
};

// Throws std::invalid_argument when a class is missing from the training split.
GestureTrainResult train_gesture(const std::vector<GestureWindow>& data,
                                 const GestureTrainConfig& config);

struct GestureInference {
  GestureClass cls = GestureClass::NoAction;
  std::array<double, kGestureClasses> probs{};
};

GestureInference infer_gesture(const ModelGraph& model, const GestureWindow& window);
GestureInference infer_gesture_int8(const ModelGraph& model, const GestureWindow& window);

// Accuracy helpers over labelled windows (batched float inference).
double gesture_accuracy(const ModelGraph& model, const std::vector<GestureWindow>& data,
                        const std::vector<std::size_t>& indices, ConfusionMatrix* confusion = nullptr);

}  // namespace graspstack

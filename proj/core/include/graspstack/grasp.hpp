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
#include <string>
#include <string_view>
#include <vector>

#include "graspstack/model.hpp"

namespace graspstack {

enum class ObjectClass : std::uint8_t { Ball = 0, Cup, Bottle, Pen, Spoon, Cube };
inline constexpr std::size_t kObjectClasses = 6;

std::string_view object_name(std::size_t class_id);
std::optional<std::size_t> object_from_name(std::string_view name);

enum class GraspPattern : std::uint8_t { PowerGrip = 0, Pinch = 1, Pronated = 2 };
inline constexpr std::size_t kGraspPatterns = 3;
std::string_view to_string(GraspPattern p);

// Forces are normalised to this full scale.
inline constexpr double kFullScaleForceN = 5.0;

struct GraspDecision {
  GraspPattern pattern = GraspPattern::PowerGrip;
  std::array<double, kGraspPatterns> pattern_probs{};
  double max_force = 0.0;  // [0, 1] of kFullScaleForceN
};

struct ObjectGrasp {
  GraspPattern pattern;
  double force;  // normalised
};

// Synthetic object -> (grasp, force) labels used to generate training data.
using GraspTable = std::array<ObjectGrasp, kObjectClasses>;
GraspTable canonical_grasp_table();

// Object id encoded as id / (num_classes - 1) in a 1 x 1 x 1 tensor.
Tensor grasp_input(std::size_t object_id, std::size_t num_classes = kObjectClasses);

// conv1x1(16)+relu, global average pool, then two branches of dense(16)+relu:
// grasp head dense(3)+softmax and force head dense(1) linear.
ModelGraph build_grasp_force_net(std::size_t num_classes = kObjectClasses);

struct GraspSample {
  std::size_t object_id;
  GraspPattern pattern;
  double force;
};

// `n` samples cycling through every object id, force jittered uniformly by
// +/- force_noise.
std::vector<GraspSample> make_grasp_dataset(const GraspTable& table, std::size_t n,
                                            double force_noise, std::uint64_t seed);

struct GraspTrainConfig {
  std::size_t epochs = 200;
  double lr = 0.002;
  std::size_t batch = 4;
  std::uint64_t seed = 1;
  bool qat = false;
};

struct GraspMetrics {
  double grasp_accuracy = 0.0;  // test split
  double force_mae = 0.0;       // test split
  double train_grasp_accuracy = 0.0;
  double train_force_mae = 0.0;
  std::size_t train_size = 0, test_size = 0, val_size = 0;
  double final_loss = 0.0;
  std::vector<std::string> warnings;
};

struct GraspTrainResult {
  ModelGraph model;
  GraspMetrics metrics;
  std::vector<std::size_t> test_indices;
};

// Requires every object id in [0, num_classes) to appear; conflicting grasp
// labels for one id produce a warning and training proceeds.
GraspTrainResult train_grasp_force(const std::vector<GraspSample>& data, std::size_t num_classes,
                                   const GraspTrainConfig& config);

GraspDecision infer_grasp_force(const ModelGraph& model, std::size_t object_id,
                                std::size_t num_classes = kObjectClasses);
GraspDecision infer_grasp_force_int8(const ModelGraph& model, std::size_t object_id,
                                     std::size_t num_classes = kObjectClasses);

}  // namespace graspstack

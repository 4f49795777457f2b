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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "graspstack/ops.hpp"
#include "graspstack/tensor.hpp"

namespace graspstack {

enum class LayerKind : std::uint8_t {
  Conv2D = 1,
  Dense = 2,
  ReLU = 3,
  MaxPool2D = 4,
  Dropout = 5,
  Flatten = 6,
  GlobalAvgPool = 7,
  Softmax = 8,
};

std::string_view to_string(LayerKind kind);
std::optional<LayerKind> layer_kind_from_string(std::string_view name);

// INT8 annotation for a parameterised layer: weights quantized with
// 2^weight_exp, outputs requantized to 2^output_exp.
struct LayerQuant {
  int weight_exp = 0;
  int output_exp = 0;
  std::vector<std::int8_t> weights;
};

struct Layer {
  LayerKind kind = LayerKind::ReLU;
  std::array<std::size_t, 2> kernel{0, 0};  // Conv2D
  Conv2DSpec conv;                          // Conv2D
  std::size_t units = 0;                    // Conv2D filters / Dense units
  std::array<std::size_t, 2> window{0, 0};  // MaxPool2D
  double rate = 0.0;                        // Dropout

  Tensor weights;
  Tensor bias;
  std::optional<LayerQuant> quant;

  // Per-sample shapes, filled in by ModelGraph::finalize().
  Shape in_shape;
  Shape out_shape;

  static Layer conv2d(std::size_t kh, std::size_t kw, std::size_t filters, Conv2DSpec spec = {});
  static Layer dense(std::size_t units);
  static Layer relu();
  static Layer max_pool(std::size_t ph, std::size_t pw);
  static Layer dropout(double rate);
  static Layer flatten();
  static Layer global_avg_pool();
  static Layer softmax();

  bool has_params() const { return kind == LayerKind::Conv2D || kind == LayerKind::Dense; }
  std::size_t param_count() const;
};

enum class HeadLoss : std::uint8_t { CrossEntropy = 1, MeanAbsolute = 2 };

struct Head {
  std::string name;
  HeadLoss loss = HeadLoss::CrossEntropy;
  std::vector<Layer> layers;
};

// A shared trunk feeding one or more heads. Single-output networks use one
// head with no layers of its own.
struct ModelGraph {
  std::string name;
  Shape input_shape;
  std::vector<Layer> trunk;
  std::vector<Head> heads;
  std::optional<int> input_exp;  // set once the model is quantized

  // Propagates shapes through every layer, allocating zero parameters where
  // none are present. Throws ShapeError naming the first layer that does not
  // compose.
  void finalize();
  // Glorot-uniform weights, zero biases.
  void init_params(std::uint64_t seed);
  std::size_t param_count() const;
  Shape trunk_output_shape() const;
  Shape head_output_shape(std::size_t head) const;
};

// Inference. `input` is one sample shaped like model.input_shape or a batch
// with a leading axis; one tensor per head is returned with the same batching.
// Dropout is the identity here.
std::vector<Tensor> forward(const ModelGraph& model, const Tensor& input);
// Pre-softmax values of the first head, for checks that need logits.
Tensor forward_logits(const ModelGraph& model, const Tensor& input);

// Per-layer record of a batched forward pass: everything backward() needs.
struct LayerRecord {
  Tensor input;
  Tensor output;
  Tensor effective_weights;  // fake-quantized weights when QAT is on
  Tensor mask;               // dropout mask
};

struct Tape {
  std::vector<LayerRecord> trunk;
  std::vector<std::vector<LayerRecord>> heads;
  std::vector<Tensor> outputs;
};

struct StepOptions {
  bool dropout = true;
  bool fake_quant = false;
  std::uint64_t seed = 0;  // dropout masks for this step
  // Keep every layer output on the tape. Backprop only needs softmax outputs.
  bool keep_outputs = true;
};

Tape record_forward(const ModelGraph& model, const Tensor& batch_input, const StepOptions& opt);

struct HeadTarget {
  std::vector<std::size_t> labels;  // CrossEntropy heads
  Tensor values;                    // MeanAbsolute heads, B x out
};

struct Batch {
  Tensor inputs;  // B x input_shape
  std::vector<HeadTarget> targets;
  std::size_t size() const { return inputs.empty() ? 0 : inputs.dim(0); }
};

struct LayerGrads {
  Tensor weights;
  Tensor bias;
};

struct Gradients {
  std::vector<LayerGrads> trunk;
  std::vector<std::vector<LayerGrads>> heads;
};

struct LossValue {
  double total = 0.0;
  std::vector<double> per_head;
};

LossValue batch_loss(const ModelGraph& model, const Tape& tape, const Batch& batch);
// Loss and parameter gradients for one batch.
LossValue compute_gradients(const ModelGraph& model, const Batch& batch, const StepOptions& opt,
                            Gradients& grads);

struct StepResult {
  double loss = 0.0;  // before the update
  bool aborted = false;
};

// One plain gradient-descent step. A non-finite loss leaves the model
// untouched and sets `aborted`.
StepResult train_step(ModelGraph& model, const Batch& batch, double lr, const StepOptions& opt);

// Index of the largest element; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

}  // namespace graspstack

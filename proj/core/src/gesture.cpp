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

#include "graspstack/gesture.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "graspstack/dataset.hpp"
#include "graspstack/quantized_model.hpp"
#include "graspstack/rng.hpp"

namespace graspstack {

namespace {

constexpr std::size_t kEvalChunk = 64;

Tensor stack_inputs(const std::vector<GestureWindow>& data, std::span<const std::size_t> idx) {
  const Tensor first = gesture_input(data[idx.front()]);
  const std::size_t per = first.size();
  Shape shape{idx.size()};
  shape.insert(shape.end(), first.shape().begin(), first.shape().end());
  std::vector<double> v;
  v.reserve(per * idx.size());
  for (std::size_t i : idx) {
    const Tensor t = gesture_input(data[i]);
    if (t.size() != per) throw ShapeError("gesture windows differ in length");
    v.insert(v.end(), t.data().begin(), t.data().end());
  }
  return Tensor(std::move(shape), std::move(v));
}

GestureInference from_probs(const Tensor& p) {
  GestureInference r;
  std::copy(p.data().begin(), p.data().end(), r.probs.begin());
  r.cls = static_cast<GestureClass>(argmax(p.data()));
  return r;
}

}  // namespace

std::string_view to_string(GestureClass g) {
  switch (g) {
    case GestureClass::TiltRight: return "TiltRight";
    case GestureClass::TiltLeft: return "TiltLeft";
    case GestureClass::NoAction: return "NoAction";
  }
  return "Unknown";
}

std::optional<GestureClass> gesture_from_string(std::string_view name) {
  for (auto g : {GestureClass::TiltRight, GestureClass::TiltLeft, GestureClass::NoAction}) {
    if (to_string(g) == name) return g;
  }
  return std::nullopt;
}

Tensor gesture_input(const GestureWindow& w) {
  if (w.samples.rank() != 2 || w.samples.dim(1) != kImuChannels) {
    throw ShapeError("gesture window must be T x 6, got " + shape_str(w.samples.shape()));
  }
  Tensor x = w.samples.reshaped({w.length(), kImuChannels, 1});
  for (std::size_t t = 0; t < w.length(); ++t) {
    for (std::size_t c = 0; c < kImuChannels; ++c) {
      x[t * kImuChannels + c] /= c < 3 ? kAccelFullScaleG : kGyroFullScaleDps;
    }
  }
  return x;
}

std::size_t min_gesture_window() {
  // three valid convolutions remove 4 + 2 + 2 rows, the 2x1 pool needs 2 more
  return 4 + 2 + 2 + 2;
}

ModelGraph build_gesture_cnn(std::size_t window_len, std::size_t channels, double dropout_rate) {
  if (window_len < min_gesture_window()) {
    throw std::invalid_argument("gesture window of " + std::to_string(window_len) +
                                " samples is too short; the conv stack requires at least " +
                                std::to_string(min_gesture_window()));
  }
  ModelGraph m;
  m.name = "gesture_cnn";
  m.input_shape = {window_len, channels, 1};
  m.trunk = {
      Layer::conv2d(5, 2, 32),  Layer::relu(),
      Layer::conv2d(3, 2, 64),  Layer::relu(),
      Layer::conv2d(3, 2, 128), Layer::relu(),
      Layer::max_pool(2, 1),    Layer::dropout(dropout_rate),
      Layer::flatten(),         Layer::dropout(dropout_rate),
      Layer::dense(128),        Layer::relu(),
      Layer::dropout(dropout_rate),
      Layer::dense(kGestureClasses),
  };
  m.heads.push_back(Head{"gesture", HeadLoss::CrossEntropy, {Layer::softmax()}});
  m.finalize();
  return m;
}

double gesture_accuracy(const ModelGraph& model, const std::vector<GestureWindow>& data,
                        const std::vector<std::size_t>& indices, ConfusionMatrix* confusion) {
  if (indices.empty()) return 0.0;
  if (confusion) *confusion = {};
  std::size_t correct = 0;
  for (std::size_t start = 0; start < indices.size(); start += kEvalChunk) {
    const std::size_t n = std::min(kEvalChunk, indices.size() - start);
    std::span<const std::size_t> chunk(indices.data() + start, n);
    const Tensor probs = forward(model, stack_inputs(data, chunk)).front();
    for (std::size_t i = 0; i < n; ++i) {
      const auto pred = argmax(probs.data().subspan(i * kGestureClasses, kGestureClasses));
      const auto truth = static_cast<std::size_t>(*data[chunk[i]].label);
      if (pred == truth) ++correct;
      if (confusion) ++(*confusion)[truth][pred];
    }
  }
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

GestureTrainResult train_gesture(const std::vector<GestureWindow>& data,
                                 const GestureTrainConfig& config) {
  if (data.empty()) throw std::invalid_argument("gesture dataset is empty");
  if (config.batch == 0) throw std::invalid_argument("batch size must be positive");
  for (const auto& w : data) {
    if (!w.label) throw std::invalid_argument("gesture dataset contains an unlabelled window");
  }
  const Split split = split_80_10_10(data.size(), Rng::derive(config.seed, 1));
  std::array<bool, kGestureClasses> seen{};
  for (std::size_t i : split.train) seen[static_cast<std::size_t>(*data[i].label)] = true;
  for (std::size_t c = 0; c < kGestureClasses; ++c) {
    if (!seen[c]) {
      throw std::invalid_argument(std::string("gesture class ") +
                                  std::string(to_string(static_cast<GestureClass>(c))) +
                                  " is absent from the training split");
    }
  }

  GestureTrainResult res;
  res.model = build_gesture_cnn(data.front().length());
  res.model.init_params(Rng::derive(config.seed, 2));

  std::vector<std::size_t> order = split.train;
  std::uint64_t step = 0;
  {
    ScopedConvPrecision precision(config.precision);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      Rng shuffle_rng(Rng::derive(config.seed, 1000 + epoch));
      shuffle_rng.shuffle(order);
      for (std::size_t start = 0; start < order.size(); start += config.batch, ++step) {
        const std::size_t n = std::min(config.batch, order.size() - start);
        std::span<const std::size_t> chunk(order.data() + start, n);
        Batch batch;
        batch.inputs = stack_inputs(data, chunk);
        HeadTarget t;
        for (std::size_t i : chunk) t.labels.push_back(static_cast<std::size_t>(*data[i].label));
        batch.targets.push_back(std::move(t));
        StepOptions opt;
        opt.fake_quant = config.qat;
        opt.seed = Rng::derive(config.seed, 1'000'000 + step);
        const StepResult r = train_step(res.model, batch, config.lr, opt);
        if (r.aborted) throw std::runtime_error("gesture training diverged at step " + std::to_string(step));
        res.metrics.final_loss = r.loss;
      }
    }
  }

  res.metrics.train_size = split.train.size();
  res.metrics.test_size = split.test.size();
  res.metrics.val_size = split.val.size();
  res.metrics.train_acc = gesture_accuracy(res.model, data, split.train);
  res.metrics.test_acc = gesture_accuracy(res.model, data, split.test, &res.metrics.confusion);
  res.metrics.val_acc = gesture_accuracy(res.model, data, split.val);
  res.test_indices = split.test;
  return res;
}

GestureInference infer_gesture(const ModelGraph& model, const GestureWindow& window) {
  return from_probs(forward(model, gesture_input(window)).front());
}

GestureInference infer_gesture_int8(const ModelGraph& model, const GestureWindow& window) {
  return from_probs(forward_int8(model, gesture_input(window)).front());
}

}  // namespace graspstack

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

#include <benchmark/benchmark.h>

#include "graspstack/gesture.hpp"
#include "graspstack/ops.hpp"
#include "graspstack/plant.hpp"
#include "graspstack/quant_eval.hpp"
#include "graspstack/rng.hpp"

namespace {

using namespace graspstack;

Tensor random_tensor(Shape shape, std::uint64_t seed) {
  Rng rng(seed);
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.uniform(-1.0, 1.0);
  return t;
}

void BM_Conv2D(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  const Tensor x = random_tensor({batch, 54, 4, 64}, 1);
  const Tensor k = random_tensor({3, 2, 64, 128}, 2);
  const Tensor b = random_tensor({128}, 3);
  ScopedConvPrecision p(state.range(1) ? ConvPrecision::Single : ConvPrecision::Double);
  for (auto _ : state) benchmark::DoNotOptimize(conv2d(x, k, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_Conv2D)->Args({1, 0})->Args({32, 0})->Args({32, 1});

void BM_Conv2DBackward(benchmark::State& state) {
  const Tensor x = random_tensor({32, 54, 4, 64}, 1);
  const Tensor k = random_tensor({3, 2, 64, 128}, 2);
  const Tensor dy = random_tensor({32, 52, 3, 128}, 3);
  ScopedConvPrecision p(state.range(0) ? ConvPrecision::Single : ConvPrecision::Double);
  for (auto _ : state) benchmark::DoNotOptimize(conv2d_backward(x, k, {}, dy));
}
BENCHMARK(BM_Conv2DBackward)->Arg(0)->Arg(1);

void BM_Dense(benchmark::State& state) {
  const Tensor x = random_tensor({32, 9984}, 1);
  const Tensor w = random_tensor({9984, 128}, 2);
  const Tensor b = random_tensor({128}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(dense(x, w, b));
}
BENCHMARK(BM_Dense);

void BM_GestureTrainStep(benchmark::State& state) {
  ModelGraph m = build_gesture_cnn();
  m.init_params(1);
  const auto data = make_gesture_dataset(11, 2);
  std::vector<double> v;
  for (std::size_t i = 0; i < 32; ++i) {
    const Tensor t = gesture_input(data[i]);
    v.insert(v.end(), t.data().begin(), t.data().end());
  }
  Batch batch;
  batch.inputs = Tensor({32, 60, 6, 1}, std::move(v));
  HeadTarget target;
  for (std::size_t i = 0; i < 32; ++i) target.labels.push_back(static_cast<std::size_t>(*data[i].label));
  batch.targets.push_back(target);
  ScopedConvPrecision p(ConvPrecision::Single);
  std::uint64_t step = 0;
  for (auto _ : state) {
    StepOptions opt;
    opt.seed = ++step;
    benchmark::DoNotOptimize(train_step(m, batch, 1e-3, opt));
  }
}
BENCHMARK(BM_GestureTrainStep)->Unit(benchmark::kMillisecond);

void BM_GestureInference(benchmark::State& state) {
  ModelGraph m = build_gesture_cnn();
  m.init_params(1);
  const auto data = make_gesture_dataset(70, 2);
  const bool int8 = state.range(0) != 0;
  if (int8) quantize_gesture_model(m, data);
  std::size_t i = 0;
  for (auto _ : state) {
    const GestureWindow& w = data[i++ % data.size()];
    benchmark::DoNotOptimize(int8 ? infer_gesture_int8(m, w) : infer_gesture(m, w));
  }
}
BENCHMARK(BM_GestureInference)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace

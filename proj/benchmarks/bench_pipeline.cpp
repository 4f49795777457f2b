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

#include "graspstack/detection.hpp"
#include "graspstack/episode.hpp"
#include "graspstack/rng.hpp"

namespace {

using namespace graspstack;

std::vector<Detection> random_boxes(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Detection> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].class_id = rng.below(3);
    out[i].confidence = rng.uniform();
    out[i].bbox = {rng.uniform(), rng.uniform(), rng.uniform(0.02, 0.3), rng.uniform(0.02, 0.3)};
    out[i].id = static_cast<int>(i);
  }
  return out;
}

void BM_Nms(benchmark::State& state) {
  const auto boxes = random_boxes(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(nms(boxes));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Nms)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_DecodeYolo(benchmark::State& state) {
  YoloHead head = YoloHead::zeros(20, {{10, 13}, {16, 30}, {33, 23}}, 640);
  Rng rng(3);
  for (double& v : head.raw) v = rng.normal(0.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(decode_yolo(head));
}
BENCHMARK(BM_DecodeYolo);

void BM_Episode(benchmark::State& state) {
  Scenario s;
  s.name = "bench";
  SceneObject bottle;
  bottle.class_id = 2;
  bottle.distance_mm = 80.0;
  bottle.width_mm = 28.0;
  s.scene = {bottle};
  s.gestures = {{500, GestureClass::TiltLeft}, {6000, GestureClass::TiltRight}};
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_episode(s, {}, ++seed));
}
BENCHMARK(BM_Episode)->Unit(benchmark::kMillisecond);

}  // namespace

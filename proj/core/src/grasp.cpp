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

#include "graspstack/grasp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "graspstack/dataset.hpp"
#include "graspstack/quantized_model.hpp"
#include "graspstack/rng.hpp"

namespace graspstack {

namespace {

constexpr std::array<std::string_view, kObjectClasses> kObjectNames = {
    "ball", "cup", "bottle", "pen", "spoon", "cube"};

Batch make_batch(const std::vector<GraspSample>& data, std::span<const std::size_t> idx,
                 std::size_t num_classes) {
  Batch b;
  std::vector<double> in, force;
  HeadTarget grasp;
  for (std::size_t i : idx) {
    in.push_back(grasp_input(data[i].object_id, num_classes)[0]);
    grasp.labels.push_back(static_cast<std::size_t>(data[i].pattern));
    force.push_back(data[i].force);
  }
  b.inputs = Tensor({idx.size(), 1, 1, 1}, std::move(in));
  b.targets.push_back(std::move(grasp));
  HeadTarget f;
  f.values = Tensor({idx.size(), 1}, std::move(force));
  b.targets.push_back(std::move(f));
  return b;
}

void evaluate(const ModelGraph& model, const std::vector<GraspSample>& data,
              const std::vector<std::size_t>& idx, std::size_t num_classes, double& acc,
              double& mae_out) {
  if (idx.empty()) {
    acc = mae_out = 0.0;
    return;
  }
  const Batch b = make_batch(data, idx, num_classes);
  const auto outs = forward(model, b.inputs);
  std::size_t correct = 0;
  double err = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto pred = argmax(outs[0].data().subspan(i * kGraspPatterns, kGraspPatterns));
    if (pred == b.targets[0].labels[i]) ++correct;
    const double f = std::clamp(outs[1][i], 0.0, 1.0);
    err += std::abs(f - data[idx[i]].force);
  }
  acc = static_cast<double>(correct) / static_cast<double>(idx.size());
  mae_out = err / static_cast<double>(idx.size());
}

GraspDecision decision_from(const std::vector<Tensor>& outs) {
  GraspDecision d;
  std::copy(outs[0].data().begin(), outs[0].data().end(), d.pattern_probs.begin());
  d.pattern = static_cast<GraspPattern>(argmax(outs[0].data()));
  d.max_force = std::clamp(outs[1][0], 0.0, 1.0);
  return d;
}

}  // namespace

std::string_view object_name(std::size_t class_id) {
  return class_id < kObjectClasses ? kObjectNames[class_id] : std::string_view("unknown");
}

std::optional<std::size_t> object_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kObjectClasses; ++i) {
    if (kObjectNames[i] == name) return i;
  }
  return std::nullopt;
}

std::string_view to_string(GraspPattern p) {
  switch (p) {
    case GraspPattern::PowerGrip: return "PowerGrip";
    case GraspPattern::Pinch: return "Pinch";
    case GraspPattern::Pronated: return "Pronated";
  }
  return "Unknown";
}

GraspTable canonical_grasp_table() {
  return {{
      {GraspPattern::PowerGrip, 0.5},  // ball
      {GraspPattern::PowerGrip, 0.7},  // cup
      {GraspPattern::PowerGrip, 0.8},  // bottle
      {GraspPattern::Pinch, 0.3},      // pen
      {GraspPattern::Pronated, 0.4},   // spoon
      {GraspPattern::Pinch, 0.5},      // cube
  }};
}

Tensor grasp_input(std::size_t object_id, std::size_t num_classes) {
  if (object_id >= num_classes) {
    throw std::out_of_range("object id " + std::to_string(object_id) + " outside [0, " +
                            std::to_string(num_classes) + ")");
  }
  const double x = num_classes > 1 ? static_cast<double>(object_id) / (num_classes - 1) : 0.0;
  return Tensor({1, 1, 1}, {x});
}

ModelGraph build_grasp_force_net(std::size_t num_classes) {
  if (num_classes == 0) throw std::invalid_argument("grasp net needs at least one object class");
  ModelGraph m;
  m.name = "grasp_force";
  m.input_shape = {1, 1, 1};
  m.trunk = {Layer::conv2d(1, 1, 16), Layer::relu(), Layer::global_avg_pool()};
  m.heads.push_back(Head{"grasp", HeadLoss::CrossEntropy,
                         {Layer::dense(16), Layer::relu(), Layer::dense(kGraspPatterns),
                          Layer::softmax()}});
  m.heads.push_back(
      Head{"force", HeadLoss::MeanAbsolute, {Layer::dense(16), Layer::relu(), Layer::dense(1)}});
  m.finalize();
  return m;
}

std::vector<GraspSample> make_grasp_dataset(const GraspTable& table, std::size_t n,
                                            double force_noise, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<GraspSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t id = i % kObjectClasses;
    const double noise = force_noise > 0.0 ? rng.uniform(-force_noise, force_noise) : 0.0;
    out.push_back({id, table[id].pattern, table[id].force + noise});
  }
  return out;
}

GraspTrainResult train_grasp_force(const std::vector<GraspSample>& data, std::size_t num_classes,
                                   const GraspTrainConfig& config) {
  if (data.empty()) throw std::invalid_argument("grasp dataset is empty");
  if (config.batch == 0) throw std::invalid_argument("batch size must be positive");
  GraspTrainResult res;
  std::vector<std::set<GraspPattern>> patterns(num_classes);
  for (const auto& s : data) {
    if (s.object_id >= num_classes) {
      throw std::invalid_argument("object id " + std::to_string(s.object_id) + " outside [0, " +
                                  std::to_string(num_classes) + ")");
    }
    patterns[s.object_id].insert(s.pattern);
  }
  for (std::size_t id = 0; id < num_classes; ++id) {
    if (patterns[id].empty()) {
      throw std::invalid_argument("grasp dataset does not cover object id " + std::to_string(id));
    }
    if (patterns[id].size() > 1) {
      std::string label = std::to_string(id);
      if (id < kObjectClasses) label += " (" + std::string(object_name(id)) + ")";
      res.metrics.warnings.push_back("conflicting grasp labels for object id " + label);
    }
  }

  const Split split = split_80_10_10(data.size(), Rng::derive(config.seed, 1));
  res.model = build_grasp_force_net(num_classes);
  res.model.init_params(Rng::derive(config.seed, 2));

  std::vector<std::size_t> order = split.train;
  std::uint64_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    Rng shuffle_rng(Rng::derive(config.seed, 1000 + epoch));
    shuffle_rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += config.batch, ++step) {
      const std::size_t n = std::min(config.batch, order.size() - start);
      const Batch batch = make_batch(data, {order.data() + start, n}, num_classes);
      StepOptions opt;
      opt.fake_quant = config.qat;
      opt.seed = Rng::derive(config.seed, 1'000'000 + step);
      const StepResult r = train_step(res.model, batch, config.lr, opt);
      if (r.aborted) throw std::runtime_error("grasp training diverged at step " + std::to_string(step));
      res.metrics.final_loss = r.loss;
    }
  }

  res.metrics.train_size = split.train.size();
  res.metrics.test_size = split.test.size();
  res.metrics.val_size = split.val.size();
  evaluate(res.model, data, split.train, num_classes, res.metrics.train_grasp_accuracy,
           res.metrics.train_force_mae);
  evaluate(res.model, data, split.test, num_classes, res.metrics.grasp_accuracy,
           res.metrics.force_mae);
  res.test_indices = split.test;
  return res;
}

GraspDecision infer_grasp_force(const ModelGraph& model, std::size_t object_id,
                                std::size_t num_classes) {
  return decision_from(forward(model, grasp_input(object_id, num_classes)));
}

GraspDecision infer_grasp_force_int8(const ModelGraph& model, std::size_t object_id,
                                     std::size_t num_classes) {
  return decision_from(forward_int8(model, grasp_input(object_id, num_classes)));
}

}  // namespace graspstack

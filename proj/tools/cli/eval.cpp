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

#include <filesystem>
#include <iostream>
#include <memory>

#include "commands.hpp"
#include "graspstack/detection.hpp"
#include "graspstack/grasp.hpp"
#include "graspstack/model_io.hpp"
#include "graspstack/plant.hpp"
#include "graspstack/quant_eval.hpp"
#include "graspstack/quantized_model.hpp"
#include "graspstack/report.hpp"
#include "graspstack/rng.hpp"

namespace graspstack::cli {

namespace {

constexpr std::uint64_t kCalibrationStream = 300;
constexpr std::uint64_t kHeldOutStream = 400;

struct MapArgs {
  std::string fixtures;
  double iou = kMapIouThreshold;
  std::string report;
};

struct QuantArgs {
  std::string model;
  std::size_t samples = 200;
  std::optional<std::uint64_t> seed;
  std::string report;
};

void emit(const std::string& path, const Report& rep) {
  const std::string text = report_text(rep);
  std::cout << text;
  if (!path.empty()) write_text_file(path, text);
}

int eval_map(const MapArgs& a) {
  const std::filesystem::path dir(a.fixtures);
  const auto det_path = dir / "detections.jsonl";
  const auto gt_path = dir / "ground_truth.jsonl";
  for (const auto& p : {det_path, gt_path}) {
    if (!std::filesystem::exists(p)) throw UsageError("missing fixture file '" + p.string() + "'");
  }
  const auto preds = read_detections_jsonl(det_path);
  const auto gts = read_ground_truth_jsonl(gt_path);
  if (gts.empty()) throw UsageError("fixture '" + gt_path.string() + "' has no ground truth");
  const MapResult r = evaluate_map(preds, gts, a.iou);

  Report rep;
  rep.command = "eval map";
  rep.metrics["map"] = r.map;
  rep.metrics["ground_truth_boxes"] = static_cast<double>(gts.size());
  std::size_t n = 0;
  for (const auto& img : preds) n += img.detections.size();
  rep.metrics["predicted_boxes"] = static_cast<double>(n);
  nlohmann::json per_class = nlohmann::json::array();
  for (const ClassAp& c : r.per_class) {
    per_class.push_back({{"class_id", c.class_id}, {"ap", c.ap}, {"gt_count", c.gt_count}});
  }
  rep.details["per_class"] = per_class;
  rep.details["iou_threshold"] = a.iou;
  emit(a.report, rep);
  return kExitOk;
}

int eval_quant(const QuantArgs& a) {
  if (!std::filesystem::exists(a.model)) throw UsageError("model file '" + a.model + "' does not exist");
  if (a.samples == 0) throw UsageError("--samples must be positive");
  ModelGraph model = load_model(a.model);
  const std::uint64_t seed = resolve_seed(a.seed, 1);
  const bool was_quantized = is_quantized(model);

  Report rep;
  rep.command = "eval quant";
  rep.seed = seed;
  rep.details["model"] = model.name;
  rep.details["calibrated_here"] = !was_quantized;
  Agreement ag;
  if (model.name == "gesture_cnn") {
    GestureGenConfig gen;
    gen.window_len = model.input_shape.at(0);
    if (!was_quantized) {
      quantize_gesture_model(model, make_gesture_dataset(70, Rng::derive(seed, kCalibrationStream), gen));
    }
    auto held_out = make_gesture_dataset((a.samples + kGestureClasses - 1) / kGestureClasses,
                                         Rng::derive(seed, kHeldOutStream), gen);
    held_out.resize(a.samples);
    ag = gesture_int8_agreement(model, held_out);
  } else if (model.name == "grasp_force") {
    const std::size_t classes = kObjectClasses;
    if (!was_quantized) quantize_grasp_model(model, classes);
    const auto held_out = make_grasp_dataset(canonical_grasp_table(), a.samples, 0.0, Rng::derive(seed, kHeldOutStream));
    ag = grasp_int8_agreement(model, held_out, classes);
    rep.metrics["force_max_abs_diff"] = ag.max_force_diff;
  } else {
    throw UsageError("eval quant supports gesture_cnn and grasp_force models, got '" + model.name + "'");
  }
  rep.metrics["agreement"] = ag.rate();
  rep.metrics["samples"] = static_cast<double>(ag.total);
  emit(a.report, rep);
  return kExitOk;
}

}  // namespace

void register_eval(CLI::App& app, int* exit) {
  CLI::App* eval = app.add_subcommand("eval", "Evaluate detections or INT8 fidelity");
  eval->require_subcommand(1);

  auto m = std::make_shared<MapArgs>();
  CLI::App* map = eval->add_subcommand("map", "mAP@IoU over detections.jsonl / ground_truth.jsonl");
  map->add_option("--fixtures", m->fixtures, "Directory holding the two fixture files")->required();
  map->add_option("--iou", m->iou, "IoU threshold")->check(CLI::Range(0.0, 1.0));
  map->add_option("--report", m->report, "Also write the report to this file");
  map->callback([m, exit] { *exit = eval_map(*m); });

  auto q = std::make_shared<QuantArgs>();
  CLI::App* quant = eval->add_subcommand("quant", "Float vs INT8 argmax agreement on held-out synthetic inputs");
  quant->add_option("--model", q->model, "Trained model file")->required();
  quant->add_option("--samples", q->samples, "Held-out inputs");
  quant->add_option("--seed", q->seed, "Seed for calibration and held-out data");
  quant->add_option("--report", q->report, "Also write the report to this file");
  quant->callback([q, exit] { *exit = eval_quant(*q); });
}

}  // namespace graspstack::cli

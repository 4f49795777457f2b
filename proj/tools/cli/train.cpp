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

#include <iostream>
#include <memory>
#include <set>

#include "commands.hpp"
#include "graspstack/grasp.hpp"
#include "graspstack/gesture.hpp"
#include "graspstack/model_io.hpp"
#include "graspstack/plant.hpp"
#include "graspstack/quant_eval.hpp"
#include "graspstack/report.hpp"
#include "graspstack/rng.hpp"

namespace graspstack::cli {

namespace {

// Stream ids that separate dataset generation from training randomness.
constexpr std::uint64_t kDataStream = 100;

struct TrainArgs {
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  std::optional<double> lr;
  std::optional<std::size_t> batch;
  bool qat = false;
  bool int8 = false;
  std::string report;
  std::size_t per_class = 220;
  std::size_t points = 3000;
  double noise = 0.01;
};

void emit(const TrainArgs& a, const Report& rep) {
  const std::string text = report_text(rep);
  std::cout << text;
  if (!a.report.empty()) write_text_file(a.report, text);
}

int train_gesture_cmd(const TrainArgs& a) {
  GestureTrainConfig cfg;
  cfg.seed = resolve_seed(a.seed, cfg.seed);
  if (a.epochs) cfg.epochs = *a.epochs;
  if (a.lr) cfg.lr = *a.lr;
  if (a.batch) cfg.batch = *a.batch;
  cfg.qat = a.qat;
  const auto data = make_gesture_dataset(a.per_class, Rng::derive(cfg.seed, kDataStream));
  GestureTrainResult r = train_gesture(data, cfg);

  Report rep;
  rep.command = "train gesture";
  rep.seed = cfg.seed;
  rep.metrics["train_accuracy"] = r.metrics.train_acc;
  rep.metrics["test_accuracy"] = r.metrics.test_acc;
  rep.metrics["val_accuracy"] = r.metrics.val_acc;
  rep.metrics["final_loss"] = r.metrics.final_loss;
  rep.metrics["train_size"] = static_cast<double>(r.metrics.train_size);
  rep.metrics["test_size"] = static_cast<double>(r.metrics.test_size);
  rep.metrics["val_size"] = static_cast<double>(r.metrics.val_size);
  rep.metrics["params"] = static_cast<double>(r.model.param_count());
  nlohmann::json confusion = nlohmann::json::array();
  for (const auto& row : r.metrics.confusion) confusion.push_back(row);
  rep.details["confusion_test"] = confusion;
  rep.details["epochs"] = cfg.epochs;
  rep.details["lr"] = cfg.lr;
  rep.details["batch"] = cfg.batch;

  if (a.int8) {
    const std::set<std::size_t> test(r.test_indices.begin(), r.test_indices.end());
    std::vector<GestureWindow> calib, held_out;
    for (std::size_t i = 0; i < data.size(); ++i) (test.contains(i) ? held_out : calib).push_back(data[i]);
    quantize_gesture_model(r.model, calib);
    rep.metrics["int8_agreement_test"] = gesture_int8_agreement(r.model, held_out).rate();
  }
  save_model(r.model, a.out);
  emit(a, rep);
  return kExitOk;
}

int train_grasp_cmd(const TrainArgs& a) {
  GraspTrainConfig cfg;
  cfg.seed = resolve_seed(a.seed, cfg.seed);
  if (a.epochs) cfg.epochs = *a.epochs;
  if (a.lr) cfg.lr = *a.lr;
  if (a.batch) cfg.batch = *a.batch;
  cfg.qat = a.qat;
  const auto data = make_grasp_dataset(canonical_grasp_table(), a.points, a.noise, Rng::derive(cfg.seed, kDataStream));
  GraspTrainResult r = train_grasp_force(data, kObjectClasses, cfg);
  for (const std::string& w : r.metrics.warnings) std::cerr << "warning: " << w << '\n';

  Report rep;
  rep.command = "train graspforce";
  rep.seed = cfg.seed;
  rep.metrics["grasp_accuracy"] = r.metrics.grasp_accuracy;
  rep.metrics["force_mae"] = r.metrics.force_mae;
  rep.metrics["train_grasp_accuracy"] = r.metrics.train_grasp_accuracy;
  rep.metrics["train_force_mae"] = r.metrics.train_force_mae;
  rep.metrics["final_loss"] = r.metrics.final_loss;
  rep.metrics["train_size"] = static_cast<double>(r.metrics.train_size);
  rep.metrics["test_size"] = static_cast<double>(r.metrics.test_size);
  rep.metrics["val_size"] = static_cast<double>(r.metrics.val_size);
  rep.metrics["params"] = static_cast<double>(r.model.param_count());
  rep.details["epochs"] = cfg.epochs;
  rep.details["lr"] = cfg.lr;
  rep.details["batch"] = cfg.batch;
  rep.details["warnings"] = r.metrics.warnings;
  nlohmann::json table = nlohmann::json::array();
  for (std::size_t id = 0; id < kObjectClasses; ++id) {
    const GraspDecision d = infer_grasp_force(r.model, id);
    table.push_back({{"object", std::string(object_name(id))},
                     {"pattern", std::string(to_string(d.pattern))},
                     {"max_force", d.max_force}});
  }
  rep.details["predictions"] = table;

  if (a.int8) {
    quantize_grasp_model(r.model);
    std::vector<GraspSample> held_out;
    for (std::size_t i : r.test_indices) held_out.push_back(data[i]);
    const Agreement ag = grasp_int8_agreement(r.model, held_out);
    rep.metrics["int8_agreement_test"] = ag.rate();
    rep.metrics["int8_force_max_diff"] = ag.max_force_diff;
  }
  save_model(r.model, a.out);
  emit(a, rep);
  return kExitOk;
}

void common_options(CLI::App* cmd, TrainArgs& a) {
  cmd->add_option("--out", a.out, "Model file to write (.json selects the JSON mirror)")->required();
  cmd->add_option("--seed", a.seed, "Training seed (default: GRASPSTACK_SEED, then 1)");
  cmd->add_option("--epochs", a.epochs, "Epochs");
  cmd->add_option("--lr", a.lr, "Learning rate")->check(CLI::PositiveNumber);
  cmd->add_option("--batch", a.batch, "Mini-batch size")->check(CLI::PositiveNumber);
  cmd->add_flag("--qat", a.qat, "Fake-quantize weights and activations during training");
  cmd->add_flag("--int8", a.int8, "Calibrate and attach INT8 parameters before saving");
  cmd->add_option("--report", a.report, "Also write the metrics report to this file");
}

}  // namespace

void register_train(CLI::App& app, int* exit) {
  CLI::App* train = app.add_subcommand("train", "Train a model on seeded synthetic data");
  train->require_subcommand(1);

  auto g = std::make_shared<TrainArgs>();
  CLI::App* gesture = train->add_subcommand("gesture", "IMU gesture CNN (defaults: 300 epochs, lr 0.001, batch 32)");
  common_options(gesture, *g);
  gesture->add_option("--per-class", g->per_class, "Synthetic windows per class")->check(CLI::PositiveNumber);
  gesture->callback([g, exit] { *exit = train_gesture_cmd(*g); });

  auto f = std::make_shared<TrainArgs>();
  CLI::App* grasp = train->add_subcommand("graspforce", "Grasp pattern + force network (defaults: 200 epochs, lr 0.002)");
  common_options(grasp, *f);
  grasp->add_option("--points", f->points, "Synthetic samples")->check(CLI::PositiveNumber);
  grasp->add_option("--noise", f->noise, "Uniform force label noise (+/-)")->check(CLI::NonNegativeNumber);
  grasp->callback([f, exit] { *exit = train_grasp_cmd(*f); });
}

}  // namespace graspstack::cli

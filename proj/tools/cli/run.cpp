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
#include "graspstack/episode.hpp"
#include "graspstack/model_io.hpp"
#include "graspstack/report.hpp"

namespace graspstack::cli {

namespace {

struct RunArgs {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string log;
  std::string report;
  std::string gesture_model;
  std::string grasp_model;
};

int exit_code(Outcome o) {
  switch (o) {
    case Outcome::Success: return kExitOk;
    case Outcome::Broken: return kExitBroken;
    case Outcome::Timeout: return kExitTimeout;
    case Outcome::Aborted: return kExitFailure;
  }
  return kExitFailure;
}

ModelGraph load_or_usage(const std::string& path) {
  if (!std::filesystem::exists(path)) throw UsageError("model file '" + path + "' does not exist");
  return load_model(path);
}

int run(const RunArgs& a) {
  if (!std::filesystem::exists(a.scenario)) throw UsageError("scenario file '" + a.scenario + "' does not exist");
  const Scenario scenario = load_scenario(a.scenario);
  const std::uint64_t seed = resolve_seed(a.seed, scenario.seed);
  EpisodeModels models;
  if (!a.gesture_model.empty()) models.gesture = load_or_usage(a.gesture_model);
  if (!a.grasp_model.empty()) models.grasp = load_or_usage(a.grasp_model);
  if (scenario.gesture_source == GestureSource::Model && !models.gesture) {
    throw UsageError("scenario '" + scenario.name + "' recognises gestures with a model; pass --gesture-model");
  }

  const EpisodeResult r = run_episode(scenario, models, seed);
  const std::string log = episode_log(r);
  Report rep;
  rep.command = "run";
  rep.seed = seed;
  const EpisodeMetrics& m = r.metrics;
  rep.metrics["episode.outcome_code"] = exit_code(r.outcome);
  rep.metrics["episode.events"] = static_cast<double>(r.events.size());
  rep.metrics["episode.camera_frames"] = static_cast<double>(m.camera_frames);
  rep.metrics["episode.max_grip_force_n"] = m.max_grip_force_n;
  rep.metrics["energy.consumed_mwh"] = m.energy_mwh;
  rep.metrics["energy.remaining_mwh"] = m.battery_end_mwh;
  auto put_s = [&rep](const char* key, const std::optional<std::int64_t>& v) {
    if (v) rep.metrics[key] = static_cast<double>(*v) / 1000.0;
  };
  put_s("timing.close_duration_s", m.close_duration_ms);
  put_s("timing.open_duration_s", m.open_duration_ms);
  put_s("timing.time_to_grasp_s", m.time_to_grasp_ms);
  if (m.activation_ms && m.first_frame_ms) {
    rep.metrics["timing.first_frame_latency_s"] = static_cast<double>(*m.first_frame_ms - *m.activation_ms) / 1000.0;
  }
  rep.details["scenario"] = r.scenario;
  rep.details["outcome"] = std::string(to_string(r.outcome));

  if (a.log.empty()) {
    std::cout << log;
  } else {
    write_text_file(a.log, log);
  }
  if (!a.report.empty()) write_text_file(a.report, report_text(rep));
  std::cerr << r.scenario << ": " << to_string(r.outcome) << '\n';
  return exit_code(r.outcome);
}

}  // namespace

void register_run(CLI::App& app, int* exit) {
  auto args = std::make_shared<RunArgs>();
  CLI::App* cmd = app.add_subcommand("run", "Run one scenario episode and emit its event log");
  cmd->add_option("--scenario", args->scenario, "Scenario JSON file")->required();
  cmd->add_option("--seed", args->seed, "Episode seed (default: GRASPSTACK_SEED, then the scenario's seed)");
  cmd->add_option("--log", args->log, "Write the JSON-lines event log here instead of stdout");
  cmd->add_option("--report", args->report, "Write a metrics report JSON here");
  cmd->add_option("--gesture-model", args->gesture_model, "Gesture model for gesture_source \"model\"");
  cmd->add_option("--grasp-model", args->grasp_model, "Grasp/force model replacing the object table");
  cmd->callback([args, exit] { *exit = run(*args); });
}

}  // namespace graspstack::cli

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
#include <sstream>

#include "commands.hpp"
#include "graspstack/detection.hpp"
#include "graspstack/grasp.hpp"
#include "graspstack/plant.hpp"
#include "graspstack/report.hpp"
#include "graspstack/rng.hpp"

namespace graspstack::cli {

namespace {

struct GenArgs {
  std::string out;
  std::optional<std::uint64_t> seed;
  std::size_t count = 0;
  double noise = 0.01;
};

int gen_gestures(const GenArgs& a) {
  const std::uint64_t seed = resolve_seed(a.seed, 1);
  const auto data = make_gesture_dataset(a.count, seed);
  std::ostringstream os;
  for (const GestureWindow& w : data) {
    nlohmann::json samples = nlohmann::json::array();
    const auto v = w.samples.data();
    for (std::size_t t = 0; t < w.length(); ++t) {
      samples.push_back(std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(t * kImuChannels),
                                            v.begin() + static_cast<std::ptrdiff_t>((t + 1) * kImuChannels)));
    }
    os << nlohmann::json{{"label", std::string(to_string(*w.label))},
                         {"rate_hz", w.sample_rate_hz},
                         {"samples", samples}}
              .dump()
       << '\n';
  }
  write_text_file(a.out, os.str());
  std::cout << data.size() << " windows -> " << a.out << '\n';
  return kExitOk;
}

int gen_grasp(const GenArgs& a) {
  const std::uint64_t seed = resolve_seed(a.seed, 1);
  const auto data = make_grasp_dataset(canonical_grasp_table(), a.count, a.noise, seed);
  std::ostringstream os;
  for (const GraspSample& s : data) {
    os << nlohmann::json{{"object", std::string(object_name(s.object_id))},
                         {"pattern", std::string(to_string(s.pattern))},
                         {"force", s.force}}
              .dump()
       << '\n';
  }
  write_text_file(a.out, os.str());
  std::cout << data.size() << " samples -> " << a.out << '\n';
  return kExitOk;
}

// Ground truth plus an imperfect detector's output: most objects found with
// jittered boxes, some missed, a few spurious boxes.
int gen_detections(const GenArgs& a) {
  const std::uint64_t seed = resolve_seed(a.seed, 1);
  Rng rng(seed);
  std::vector<GroundTruth> gts;
  std::vector<ImageDetections> preds;
  for (std::size_t i = 0; i < a.count; ++i) {
    const std::string id = "img" + std::to_string(i);
    ImageDetections img{id, {}};
    const std::size_t objects = 1 + rng.below(3);
    for (std::size_t k = 0; k < objects; ++k) {
      GroundTruth g{id, rng.below(kObjectClasses),
                    {rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8), rng.uniform(0.1, 0.3), rng.uniform(0.1, 0.3)}};
      gts.push_back(g);
      if (rng.uniform() < 0.9) {
        Detection d;
        d.class_id = g.class_id;
        d.confidence = rng.uniform(0.5, 1.0);
        d.bbox = {g.bbox.cx + rng.normal(0.0, 0.01), g.bbox.cy + rng.normal(0.0, 0.01),
                  g.bbox.w * (1.0 + rng.normal(0.0, 0.05)), g.bbox.h * (1.0 + rng.normal(0.0, 0.05))};
        img.detections.push_back(d);
      }
    }
    if (rng.uniform() < 0.3) {
      Detection fp;
      fp.class_id = rng.below(kObjectClasses);
      fp.confidence = rng.uniform(0.05, 0.6);
      fp.bbox = {rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng.uniform(0.05, 0.2), rng.uniform(0.05, 0.2)};
      img.detections.push_back(fp);
    }
    preds.push_back(std::move(img));
  }
  std::filesystem::create_directories(a.out);
  write_detections_jsonl(preds, std::filesystem::path(a.out) / "detections.jsonl");
  write_ground_truth_jsonl(gts, std::filesystem::path(a.out) / "ground_truth.jsonl");
  std::cout << gts.size() << " boxes over " << a.count << " images -> " << a.out << '\n';
  return kExitOk;
}

}  // namespace

void register_gen(CLI::App& app, int* exit) {
  CLI::App* gen = app.add_subcommand("gen", "Generate synthetic fixtures");
  gen->require_subcommand(1);

  auto g = std::make_shared<GenArgs>();
  g->count = 220;
  CLI::App* gestures = gen->add_subcommand("gestures", "Labelled IMU windows as JSON lines");
  gestures->add_option("--out", g->out, "Output file")->required();
  gestures->add_option("--per-class", g->count, "Windows per class")->check(CLI::PositiveNumber);
  gestures->add_option("--seed", g->seed, "Generator seed");
  gestures->callback([g, exit] { *exit = gen_gestures(*g); });

  auto f = std::make_shared<GenArgs>();
  f->count = 3000;
  CLI::App* grasp = gen->add_subcommand("grasp", "Object -> grasp/force samples as JSON lines");
  grasp->add_option("--out", f->out, "Output file")->required();
  grasp->add_option("--points", f->count, "Samples")->check(CLI::PositiveNumber);
  grasp->add_option("--noise", f->noise, "Uniform force noise (+/-)")->check(CLI::NonNegativeNumber);
  grasp->add_option("--seed", f->seed, "Generator seed");
  grasp->callback([f, exit] { *exit = gen_grasp(*f); });

  auto d = std::make_shared<GenArgs>();
  d->count = 50;
  CLI::App* dets = gen->add_subcommand("detections", "Detection/ground-truth fixture directory for eval map");
  dets->add_option("--out", d->out, "Output directory")->required();
  dets->add_option("--images", d->count, "Images")->check(CLI::PositiveNumber);
  dets->add_option("--seed", d->seed, "Generator seed");
  dets->callback([d, exit] { *exit = gen_detections(*d); });
}

}  // namespace graspstack::cli

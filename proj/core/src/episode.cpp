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

#include "graspstack/episode.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

#include "graspstack/grasp.hpp"
#include "graspstack/power.hpp"
#include "graspstack/quantized_model.hpp"

namespace graspstack {

using nlohmann::json;

namespace {

enum Stream : std::uint64_t { kDetectStream = 1, kTofStream, kForceStream, kImuStream };

constexpr double kGestureConfidence = 0.9;

GraspPolicy make_policy(const EpisodeModels& models) {
  if (models.grasp) {
    const ModelGraph& m = *models.grasp;
    if (is_quantized(m)) return [&m](std::size_t id) { return infer_grasp_force_int8(m, id); };
    return [&m](std::size_t id) { return infer_grasp_force(m, id); };
  }
  return [table = canonical_grasp_table()](std::size_t id) {
    GraspDecision d;
    d.pattern = table.at(id).pattern;
    d.pattern_probs[static_cast<std::size_t>(d.pattern)] = 1.0;
    d.max_force = table.at(id).force;
    return d;
  };
}

// Turns the scenario's gesture script into recognised gestures, either
// verbatim or by classifying a synthesised palm IMU stream.
class GestureSourceRunner {
 public:
  GestureSourceRunner(const Scenario& s, const EpisodeModels& models, std::uint64_t seed)
      : script_(s.gestures.begin(), s.gestures.end()),
        model_(s.gesture_source == GestureSource::Model && models.gesture ? &*models.gesture : nullptr),
        imu_rng_(Rng::derive(seed, kImuStream)),
        imu_cadence_(static_cast<int>(kImuRateHz), 0) {
    if (s.gesture_source == GestureSource::Model) {
      if (!models.gesture) throw std::invalid_argument("scenario uses model gestures but no gesture model was given");
      gen_.window_len = model_->input_shape.at(0);
      gen_.gyro_noise_dps = s.noise.imu_gyro_dps;
      gen_.accel_noise_g = s.noise.imu_accel_g;
      std::vector<ImuSynth::Pulse> pulses;
      for (const ScriptedGesture& g : s.gestures) pulses.push_back({g.t_ms, g.gesture});
      synth_.emplace(std::move(pulses), gen_);
    }
  }

  std::optional<GestureClass> poll(std::int64_t t, ImuSample& imu) {
    if (!model_) {
      if (!script_.empty() && script_.front().t_ms <= t) {
        const GestureClass g = script_.front().gesture;
        script_.pop_front();
        return g;
      }
      return std::nullopt;
    }
    if (!imu_cadence_.due(t)) return std::nullopt;
    imu = synth_->sample(t, imu_rng_);
    window_.push_back(imu);
    if (window_.size() > gen_.window_len) window_.pop_front();
    if (window_.size() < gen_.window_len || t < quiet_until_) return std::nullopt;
    GestureWindow w;
    std::vector<double> v;
    v.reserve(gen_.window_len * kImuChannels);
    for (const ImuSample& s : window_) {
      v.insert(v.end(), s.accel.begin(), s.accel.end());
      v.insert(v.end(), s.gyro.begin(), s.gyro.end());
    }
    w.samples = Tensor({gen_.window_len, kImuChannels}, std::move(v));
    const GestureInference r = is_quantized(*model_) ? infer_gesture_int8(*model_, w) : infer_gesture(*model_, w);
    if (r.cls == GestureClass::NoAction || r.probs[static_cast<std::size_t>(r.cls)] < kGestureConfidence) {
      return std::nullopt;
    }
    // one recognition per pulse: wait until it has left the window
    quiet_until_ = t + static_cast<std::int64_t>(1000.0 * static_cast<double>(gen_.window_len) / kImuRateHz);
    return r.cls;
  }

 private:
  std::deque<ScriptedGesture> script_;
  const ModelGraph* model_;
  GestureGenConfig gen_;
  std::optional<ImuSynth> synth_;
  Rng imu_rng_;
  Cadence imu_cadence_;
  std::deque<ImuSample> window_;
  std::int64_t quiet_until_ = 0;
};

template <class T>
std::optional<std::int64_t> first_time(const std::vector<ControllerEvent>& evs, EventKind k, T after) {
  for (const ControllerEvent& e : evs) {
    if (e.kind == k && e.t_ms >= after) return e.t_ms;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Success: return "Success";
    case Outcome::Broken: return "Broken";
    case Outcome::Timeout: return "Timeout";
    case Outcome::Aborted: return "Aborted";
  }
  return "?";
}

Outcome classify_outcome(const std::vector<ControllerEvent>& events) {
  auto any = [&events](EventKind k) {
    return std::any_of(events.begin(), events.end(), [k](const ControllerEvent& e) { return e.kind == k; });
  };
  if (any(EventKind::ObjectBroken)) return Outcome::Broken;
  if (any(EventKind::GraspComplete)) return Outcome::Success;
  if (any(EventKind::Timeout)) return Outcome::Timeout;
  return Outcome::Aborted;
}

EpisodeResult run_episode(const Scenario& scenario, const EpisodeModels& models, std::uint64_t seed,
                          const EpisodeOptions& options) {
  for (std::size_t i = 0; i < scenario.scene.size(); ++i) {
    if (scenario.scene[i].class_id >= kObjectClasses) {
      throw SchemaError("$.scene[" + std::to_string(i) + "].class",
                        "unknown object class id " + std::to_string(scenario.scene[i].class_id));
    }
  }
  if (scenario.tick_ms <= 0 || scenario.duration_ms <= 0) {
    throw std::invalid_argument("scenario needs positive tick and duration");
  }
  scenario.controller.validate();
  scenario.power.validate();

  Controller controller(scenario.controller, make_policy(models));
  GestureSourceRunner gestures(scenario, models, seed);
  Camera camera(scenario.camera);
  Rng detect_rng(Rng::derive(seed, kDetectStream));
  Rng tof_rng(Rng::derive(seed, kTofStream));
  Rng force_rng(Rng::derive(seed, kForceStream));
  std::deque<ScriptedEvent> scripted(scenario.events.begin(), scenario.events.end());
  std::stable_sort(scripted.begin(), scripted.end(),
                   [](const ScriptedEvent& a, const ScriptedEvent& b) { return a.t_ms < b.t_ms; });

  EpisodeResult res;
  res.scenario = scenario.name;
  res.seed = seed;
  res.tick_ms = scenario.tick_ms;
  EpisodeMetrics& m = res.metrics;
  BatteryState battery = scenario.battery;
  m.battery_start_mwh = battery.remaining_mwh;

  HandState hand;
  bool broken = false;
  bool battery_low = false;
  std::int64_t t = 0;
  for (; t < scenario.duration_ms; t += scenario.tick_ms) {
    ControllerInputs in;
    in.t_ms = t;
    in.donned = t >= scenario.donned_at_ms && !(scenario.doffed_at_ms && t >= *scenario.doffed_at_ms);
    hand.donned = in.donned;
    in.gesture = gestures.poll(t, hand.wrist_imu);
    while (!scripted.empty() && scripted.front().t_ms <= t) {
      in.raw_events.push_back(scripted.front().kind);
      scripted.pop_front();
    }
    if (camera.ready(t)) m.camera_ready_ms += scenario.tick_ms;
    if (auto frame = camera.capture(t)) {
      in.detections = stub_detect(*frame, scenario.scene, scenario.camera, detect_rng);
      res.frame_times_ms.push_back(t);
    }
    const SceneObject* seen = nullptr;
    if (const auto& tgt = controller.target(); tgt && tgt->id >= 0 &&
                                               static_cast<std::size_t>(tgt->id) < scenario.scene.size()) {
      seen = &scenario.scene[static_cast<std::size_t>(tgt->id)];
    }
    if (seen) in.tof_mm = tof_read(seen, seen->distance_at(t), scenario.noise.tof_sigma_mm, tof_rng);
    for (std::size_t f = 0; f < kFingers; ++f) {
      in.force_n[f] = force_read(hand, f, scenario.noise.force_sigma_n, force_rng);
    }
    in.closure = hand.closure;
    in.battery_low = battery_low;
    in.object_broken = broken;
    battery_low = false;

    ControllerOutput out = controller.tick(in);
    for (ControllerEvent& e : out.events) res.events.push_back(std::move(e));

    if (out.camera_on && !camera.powered()) camera.power_on(t, scenario.controller.camera_init_ms);
    if (!out.camera_on && camera.powered()) camera.power_off();

    const SceneObject* held = broken ? nullptr : seen;
    hand = plant_step(hand, out.servo, held, static_cast<double>(scenario.tick_ms), scenario.plant);
    const double max_force = *std::max_element(hand.contact_force_n.begin(), hand.contact_force_n.end());
    m.max_grip_force_n = std::max(m.max_grip_force_n, max_force);
    if (held && !broken && max_force > held->breaking_force_n) broken = true;

    const double allowed = controller.force_ceiling();
    for (double c : out.servo.force_ceiling) m.max_ceiling_excess = std::max(m.max_ceiling_excess, c - allowed);
    if (controller.decision()) {
      const double bound = (controller.decision()->max_force + scenario.controller.force_margin) * kFullScaleForceN;
      m.force_bound_n = std::max(m.force_bound_n.value_or(0.0), bound);
    }

    const PowerStepResult p = power_step(battery, scenario.power, module_states_for(controller.state()),
                                         static_cast<double>(scenario.tick_ms));
    battery = p.battery;
    battery_low = p.battery_low;
    m.energy_mwh += p.debit_mwh;

    if (options.record_trace) {
      TickRecord r;
      r.t_ms = t;
      r.state = controller.state();
      r.ceiling = out.servo.force_ceiling;
      r.closure = hand.closure;
      r.max_force_n = max_force;
      r.debit_mwh = p.debit_mwh;
      res.trace.push_back(r);
    }
  }
  res.end_ms = t;
  m.battery_end_mwh = battery.remaining_mwh;
  m.camera_frames = static_cast<std::int64_t>(res.frame_times_ms.size());

  m.activation_ms = first_time(res.events, EventKind::ActivationGesture, 0);
  if (m.activation_ms) {
    for (std::int64_t ft : res.frame_times_ms) {
      if (ft >= *m.activation_ms) {
        m.first_frame_ms = ft;
        break;
      }
    }
  }
  if (auto done = first_time(res.events, EventKind::GraspComplete, 0)) {
    std::optional<std::int64_t> entry;
    for (const ControllerEvent& e : res.events) {
      if (e.to == ControllerState::Grasp && e.from != ControllerState::Grasp && e.t_ms <= *done) entry = e.t_ms;
    }
    if (entry) m.close_duration_ms = *done - *entry;
    if (m.activation_ms) m.time_to_grasp_ms = *done - *m.activation_ms;
  }
  if (auto rel = first_time(res.events, EventKind::ReleaseGesture, 0)) {
    if (auto open = first_time(res.events, EventKind::HandOpened, *rel)) m.open_duration_ms = *open - *rel;
  }
  res.outcome = classify_outcome(res.events);
  return res;
}

json event_to_json(const ControllerEvent& ev) {
  json payload;
  payload["from"] = std::string(to_string(ev.from));
  payload["to"] = std::string(to_string(ev.to));
  if (ev.target) {
    const Detection& d = *ev.target;
    payload["target"] = {{"id", d.id},
                         {"class", std::string(object_name(d.class_id))},
                         {"confidence", d.confidence},
                         {"bbox", {d.bbox.cx, d.bbox.cy, d.bbox.w, d.bbox.h}}};
  }
  if (ev.grasp) {
    payload["grasp"] = {{"pattern", std::string(to_string(ev.grasp->pattern))},
                        {"max_force", ev.grasp->max_force}};
  }
  if (ev.group) payload["group"] = *ev.group;
  if (ev.force_n) payload["force_n"] = *ev.force_n;
  if (ev.distance_mm) payload["distance_mm"] = *ev.distance_mm;
  if (!ev.stage.empty()) payload["stage"] = ev.stage;
  if (!ev.message.empty()) payload["message"] = ev.message;
  return {{"t_ms", ev.t_ms}, {"kind", std::string(to_string(ev.kind))}, {"payload", payload}};
}

json metrics_to_json(const EpisodeMetrics& m) {
  json j;
  auto put = [&j](const char* key, const auto& v) {
    if (v) {
      j[key] = *v;
    } else {
      j[key] = nullptr;
    }
  };
  put("activation_ms", m.activation_ms);
  put("first_frame_ms", m.first_frame_ms);
  put("close_duration_ms", m.close_duration_ms);
  put("open_duration_ms", m.open_duration_ms);
  put("time_to_grasp_ms", m.time_to_grasp_ms);
  put("force_bound_n", m.force_bound_n);
  j["camera_frames"] = m.camera_frames;
  j["camera_ready_ms"] = m.camera_ready_ms;
  j["max_grip_force_n"] = m.max_grip_force_n;
  j["max_ceiling_excess"] = m.max_ceiling_excess;
  j["energy_mwh"] = m.energy_mwh;
  j["battery_start_mwh"] = m.battery_start_mwh;
  j["battery_end_mwh"] = m.battery_end_mwh;
  return j;
}

void write_episode_log(std::ostream& out, const EpisodeResult& r) {
  for (const ControllerEvent& e : r.events) out << event_to_json(e).dump() << '\n';
  json outcome = {{"t_ms", r.end_ms},
                  {"kind", "Outcome"},
                  {"payload",
                   {{"outcome", std::string(to_string(r.outcome))},
                    {"scenario", r.scenario},
                    {"seed", r.seed},
                    {"tick_ms", r.tick_ms},
                    {"metrics", metrics_to_json(r.metrics)}}}};
  out << outcome.dump() << '\n';
}

std::string episode_log(const EpisodeResult& r) {
  std::ostringstream os;
  write_episode_log(os, r);
  return os.str();
}

}  // namespace graspstack

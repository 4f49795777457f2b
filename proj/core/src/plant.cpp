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

#include "graspstack/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace graspstack {

namespace {
constexpr double kKgCmToNm = 9.80665 / 100.0;
constexpr std::size_t kStubClasses = 6;
}

std::size_t group_of_finger(std::size_t finger) {
  static constexpr std::array<std::size_t, kFingers> kGroups = {0, 1, 1, 2, 2};
  return kGroups.at(finger);
}

double PlantConfig::contact_point(double width_mm) const {
  return std::clamp(1.0 - width_mm / aperture_mm, 0.0, 1.0);
}

double PlantConfig::force_cap_n() const {
  const double stall_n = stall_torque_kgcm * kKgCmToNm / (finger_lever_mm / 1000.0);
  return std::min(max_force_n, stall_n);
}

double SceneObject::distance_at(std::int64_t t_ms) const {
  return std::max(0.0, distance_mm - approach_mm_per_s * static_cast<double>(t_ms) / 1000.0);
}

BBox project_bbox(const SceneObject& obj, double distance_mm, const CameraConfig& cam) {
  const double d = std::max(distance_mm, 1.0);
  BBox b;
  b.cx = std::clamp(obj.image_x, 0.0, 1.0);
  b.cy = std::clamp(obj.image_y, 0.0, 1.0);
  b.w = std::clamp(cam.focal * obj.width_mm / d, 1e-6, 1.0);
  b.h = std::clamp(cam.focal * obj.height_mm / d, 1e-6, 1.0);
  return b;
}

ServoCommand ServoCommand::open() { return ServoCommand{}; }

ServoCommand ServoCommand::hold(const HandState& hand, double ceiling) {
  ServoCommand c;
  c.target = hand.closure;
  c.force_ceiling.fill(ceiling);
  return c;
}

HandState plant_step(const HandState& hand, const ServoCommand& cmd, const SceneObject* scene,
                     double dt_ms, const PlantConfig& cfg) {
  const double dt = std::clamp(dt_ms, 1e-9, 50.0);
  const double close_rate = 1.0 / cfg.close_full_ms;
  const double open_rate = 1.0 / cfg.open_full_ms;
  const double cap = cfg.force_cap_n();
  const double contact = scene ? cfg.contact_point(scene->width_mm) : 2.0;

  HandState next = hand;
  std::array<double, kActuationGroups> group_force{};
  for (std::size_t g = 0; g < kActuationGroups; ++g) {
    const double target = std::clamp(cmd.target[g], 0.0, 1.0);
    const double ceiling_n = std::min(cap, std::clamp(cmd.force_ceiling[g], 0.0, 1.0) * cap);
    // furthest closure the servo can reach before stalling on the object
    const double stall_at = contact + ceiling_n / cfg.contact_stiffness_n;
    double c = hand.closure[g];
    if (target > c) {
      c = std::min(target, c + close_rate * dt);
      if (c > stall_at) c = std::max(hand.closure[g], stall_at);
    } else if (target < c) {
      c = std::max(target, c - open_rate * dt);
    }
    if (c > stall_at && hand.closure[g] > stall_at) {
      // ceiling dropped below the current squeeze: back off
      c = std::max(stall_at, hand.closure[g] - open_rate * dt);
    }
    next.closure[g] = std::clamp(c, 0.0, 1.0);
    if (!scene) {
      group_force[g] = 0.0;
    } else if (next.closure[g] >= stall_at) {
      group_force[g] = ceiling_n;  // stalled: the servo holds exactly its limit
    } else {
      group_force[g] = std::clamp(cfg.contact_stiffness_n * (next.closure[g] - contact), 0.0, cap);
    }
  }
  for (std::size_t f = 0; f < kFingers; ++f) next.contact_force_n[f] = group_force[group_of_finger(f)];
  return next;
}

double ImuSynth::gyro_x(double t_ms) const {
  double v = 0.0;
  for (const Pulse& p : pulses_) {
    if (p.cls == GestureClass::NoAction) continue;
    const double u = (t_ms - static_cast<double>(p.start_ms)) / cfg_.pulse_ms;
    if (u < 0.0 || u > 1.0) continue;
    const double sign = p.cls == GestureClass::TiltRight ? 1.0 : -1.0;
    v += sign * cfg_.amplitude_dps * std::sin(std::numbers::pi * u);
  }
  return v;
}

double ImuSynth::tilt_deg(double t_ms) const {
  double theta = 0.0;
  const double pulse_s = cfg_.pulse_ms / 1000.0;
  for (const Pulse& p : pulses_) {
    if (p.cls == GestureClass::NoAction) continue;
    const double u = std::clamp((t_ms - static_cast<double>(p.start_ms)) / cfg_.pulse_ms, 0.0, 1.0);
    const double sign = p.cls == GestureClass::TiltRight ? 1.0 : -1.0;
    theta += sign * cfg_.amplitude_dps * pulse_s / std::numbers::pi * (1.0 - std::cos(std::numbers::pi * u));
  }
  return theta;
}

ImuSample ImuSynth::sample(std::int64_t t_ms, Rng& rng) const {
  ImuSample s;
  s.t_ms = t_ms;
  const double t = static_cast<double>(t_ms);
  const double theta = tilt_deg(t) * std::numbers::pi / 180.0;
  s.accel = {0.0, std::sin(theta), std::cos(theta)};
  s.gyro = {gyro_x(t), 0.0, 0.0};
  for (double& a : s.accel) a += rng.normal(0.0, cfg_.accel_noise_g);
  for (double& g : s.gyro) g += rng.normal(0.0, cfg_.gyro_noise_dps);
  return s;
}

GestureWindow gen_gesture(GestureClass cls, std::uint64_t seed, const GestureGenConfig& cfg) {
  const double period_ms = 1000.0 / cfg.rate_hz;
  const double centre_ms = static_cast<double>(cfg.window_len / 2) * period_ms;
  const auto start = static_cast<std::int64_t>(std::llround(centre_ms - cfg.pulse_ms / 2.0));
  // pulse timing must be exact, so evaluate at fractional times rather than
  // through ImuSample's integer milliseconds
  ImuSynth synth({{start, cls}}, cfg);
  const double start_exact = centre_ms - cfg.pulse_ms / 2.0;
  const double shift = static_cast<double>(start) - start_exact;
  Rng rng(seed);
  std::vector<double> v;
  v.reserve(cfg.window_len * kImuChannels);
  for (std::size_t i = 0; i < cfg.window_len; ++i) {
    const double t = static_cast<double>(i) * period_ms + shift;
    const double theta = synth.tilt_deg(t) * std::numbers::pi / 180.0;
    const double accel[3] = {0.0, std::sin(theta), std::cos(theta)};
    const double gyro[3] = {synth.gyro_x(t), 0.0, 0.0};
    for (double a : accel) v.push_back(a + rng.normal(0.0, cfg.accel_noise_g));
    for (double g : gyro) v.push_back(g + rng.normal(0.0, cfg.gyro_noise_dps));
  }
  GestureWindow w;
  w.samples = Tensor({cfg.window_len, kImuChannels}, std::move(v));
  w.label = cls;
  w.sample_rate_hz = cfg.rate_hz;
  return w;
}

std::vector<GestureWindow> make_gesture_dataset(std::size_t per_class, std::uint64_t seed,
                                                const GestureGenConfig& cfg) {
  std::vector<GestureWindow> out;
  out.reserve(per_class * kGestureClasses);
  for (std::size_t i = 0; i < per_class; ++i) {
    for (std::size_t c = 0; c < kGestureClasses; ++c) {
      out.push_back(gen_gesture(static_cast<GestureClass>(c), Rng::derive(seed, i * kGestureClasses + c), cfg));
    }
  }
  return out;
}

std::optional<double> tof_read(const SceneObject* obj, double distance_mm, double noise_sigma_mm,
                               Rng& rng, double max_range_mm) {
  if (!obj || distance_mm > max_range_mm) return std::nullopt;
  const double noise = noise_sigma_mm > 0.0 ? rng.normal(0.0, noise_sigma_mm) : 0.0;
  return std::max(0.0, distance_mm + noise);
}

std::optional<double> tof_read(const SceneObject* obj, double noise_sigma_mm, std::uint64_t seed,
                               double max_range_mm) {
  Rng rng(seed);
  return tof_read(obj, obj ? obj->distance_mm : 0.0, noise_sigma_mm, rng, max_range_mm);
}

double force_read(const HandState& hand, std::size_t finger, double noise_sigma_n, Rng& rng) {
  const double noise = noise_sigma_n > 0.0 ? rng.normal(0.0, noise_sigma_n) : 0.0;
  return std::max(0.0, hand.contact_force_n.at(finger) + noise);
}

bool Cadence::due(std::int64_t t_ms) {
  if (t_ms < start_) return false;
  if ((t_ms - start_) * hz_ >= 1000 * n_) {
    ++n_;
    return true;
  }
  return false;
}

void Camera::power_on(std::int64_t t_ms, std::int64_t init_ms) {
  if (powered_) return;
  powered_ = true;
  ready_at_ = t_ms + init_ms;
  cadence_ = Cadence(cfg_.fps, ready_at_);
}

void Camera::power_off() { powered_ = false; }

std::optional<Frame> Camera::capture(std::int64_t t_ms) {
  if (!ready(t_ms) || !cadence_.due(t_ms)) return std::nullopt;
  return Frame{frames_++, t_ms};
}

std::vector<Detection> stub_detect(const Frame& frame, const std::vector<SceneObject>& scene,
                                   const CameraConfig& cam, Rng& rng) {
  std::vector<Detection> out;
  for (std::size_t i = 0; i < scene.size(); ++i) {
    const SceneObject& o = scene[i];
    const double d = o.distance_at(frame.t_ms);
    Detection det;
    det.class_id = o.class_id;
    det.id = static_cast<int>(i);
    det.bbox = project_bbox(o, d, cam);
    det.confidence = std::clamp(cam.confidence_base - cam.confidence_decay_per_mm * d, 0.0, 1.0);
    if (cam.jitter > 0.0) {
      det.bbox.cx = std::clamp(det.bbox.cx + rng.normal(0.0, cam.jitter), 0.0, 1.0);
      det.bbox.cy = std::clamp(det.bbox.cy + rng.normal(0.0, cam.jitter), 0.0, 1.0);
      det.bbox.w = std::clamp(det.bbox.w * (1.0 + rng.normal(0.0, cam.jitter)), 1e-6, 1.0);
      det.bbox.h = std::clamp(det.bbox.h * (1.0 + rng.normal(0.0, cam.jitter)), 1e-6, 1.0);
    }
    out.push_back(det);
  }
  if (cam.false_positive_rate > 0.0 && rng.uniform() < cam.false_positive_rate) {
    Detection fp;
    fp.class_id = rng.below(kStubClasses);
    fp.id = -2 - static_cast<int>(frame.index);
    fp.confidence = rng.uniform(0.3, 0.6);
    fp.bbox = {rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng.uniform(0.02, 0.2), rng.uniform(0.02, 0.2)};
    out.push_back(fp);
  }
  return out;
}

}  // namespace graspstack

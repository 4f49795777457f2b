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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "graspstack/detection.hpp"
#include "graspstack/gesture.hpp"
#include "graspstack/rng.hpp"

namespace graspstack {

inline constexpr std::size_t kActuationGroups = 3;  // thumb; index+middle; ring+little
inline constexpr std::size_t kFingers = 5;          // thumb, index, middle, ring, little
inline constexpr std::int64_t kDefaultTickMs = 10;

std::size_t group_of_finger(std::size_t finger);

struct PlantConfig {
  double close_full_ms = 1500.0;  // full stroke, open -> closed
  double open_full_ms = 600.0;    // full stroke, closed -> open
  double aperture_mm = 80.0;      // object width that touches at closure 0
  // Fingertip compliance: newtons per unit of closure past the contact point.
  double contact_stiffness_n = 12.5;
  double max_force_n = 5.0;
  // Servo stall torque and the tendon/finger lever that maps it to the tip.
  double stall_torque_kgcm = 7.0;
  double finger_lever_mm = 137.0;

  double contact_point(double width_mm) const;
  // min(max_force_n, stall-limited fingertip force)
  double force_cap_n() const;
};

// Physical object in front of the hand.
struct SceneObject {
  std::size_t class_id = 0;
  double distance_mm = 100.0;
  double width_mm = 30.0;
  double height_mm = 30.0;
  double breaking_force_n = 50.0;
  double image_x = 0.5;  // projected centre, normalised
  double image_y = 0.5;
  double approach_mm_per_s = 0.0;  // user moving the hand towards the object

  double distance_at(std::int64_t t_ms) const;
};

struct CameraConfig {
  int fps = 9;
  double focal = 1.0;  // normalised box width = focal * size_mm / distance_mm
  double confidence_base = 0.95;
  double confidence_decay_per_mm = 0.0005;
  double jitter = 0.0;                // sigma of bbox centre/size noise
  double false_positive_rate = 0.0;  // probability of one spurious box per frame
};

BBox project_bbox(const SceneObject& obj, double distance_mm, const CameraConfig& cam);

struct ImuSample {
  std::int64_t t_ms = 0;
  std::array<double, 3> accel{0.0, 0.0, 1.0};  // g
  std::array<double, 3> gyro{0.0, 0.0, 0.0};   // deg/s
};

struct HandState {
  std::array<double, kActuationGroups> closure{};          // [0, 1]
  std::array<double, kFingers> contact_force_n{};          // >= 0, <= cap
  ImuSample wrist_imu;                                     // palm IMU, drives gestures
  // Two IMUs per finger are part of the hardware; nothing reads them yet.
  std::array<ImuSample, 2 * kFingers> finger_imu{};
  bool donned = false;
};

struct ServoCommand {
  std::array<double, kActuationGroups> target{};         // closure [0, 1]
  std::array<double, kActuationGroups> force_ceiling{};  // normalised [0, 1]

  static ServoCommand open();
  static ServoCommand hold(const HandState& hand, double ceiling);
};

struct SimClock {
  std::int64_t t_ms = 0;
  std::int64_t tick_ms = kDefaultTickMs;
  void advance() { t_ms += tick_ms; }
};

// Slews each group toward its target (1/close_full_ms per ms closing,
// 1/open_full_ms opening). Past the object's contact point closure turns into
// force through the fingertip stiffness; the servo stalls once the force meets
// min(ceiling, cap). `dt_ms` is clamped to (0, 50].
HandState plant_step(const HandState& hand, const ServoCommand& cmd, const SceneObject* scene,
                     double dt_ms, const PlantConfig& cfg = {});

struct GestureGenConfig {
  std::size_t window_len = kDefaultWindowLength;
  double rate_hz = kImuRateHz;
  double amplitude_dps = 120.0;
  double pulse_ms = 500.0;
  double gyro_noise_dps = 5.0;
  double accel_noise_g = 0.02;
};

// Half-sine gyro-x pulse centred in the window (+ for TiltRight, - for
// TiltLeft, none for NoAction), gravity rotated by the integrated tilt angle,
// Gaussian noise on every channel.
GestureWindow gen_gesture(GestureClass cls, std::uint64_t seed, const GestureGenConfig& cfg = {});
// `per_class` windows of each class, labelled, in class-interleaved order.
std::vector<GestureWindow> make_gesture_dataset(std::size_t per_class, std::uint64_t seed,
                                                const GestureGenConfig& cfg = {});

inline constexpr double kTofMaxRangeMm = 200.0;

// nullopt is the sensor's out-of-range reading.
std::optional<double> tof_read(const SceneObject* obj, double distance_mm, double noise_sigma_mm,
                               Rng& rng, double max_range_mm = kTofMaxRangeMm);
std::optional<double> tof_read(const SceneObject* obj, double noise_sigma_mm, std::uint64_t seed,
                               double max_range_mm = kTofMaxRangeMm);

inline constexpr double kForceNoiseN = 0.05;
double force_read(const HandState& hand, std::size_t finger, double noise_sigma_n, Rng& rng);

// Fires at `hz` events per second of sim time starting at `start_ms`; event n
// is due at the first tick with (t - start) * hz >= 1000 * n, so counts never
// drift.
class Cadence {
 public:
  Cadence() = default;
  Cadence(int hz, std::int64_t start_ms) : hz_(hz), start_(start_ms) {}
  bool due(std::int64_t t_ms);
  std::int64_t count() const { return n_; }

 private:
  int hz_ = 1;
  std::int64_t start_ = 0;
  std::int64_t n_ = 0;
};

struct Frame {
  std::int64_t index = 0;
  std::int64_t t_ms = 0;
};

// Wrist camera with a wake-up delay and a fixed frame rate.
class Camera {
 public:
  explicit Camera(CameraConfig cfg = {}) : cfg_(cfg) {}
  void power_on(std::int64_t t_ms, std::int64_t init_ms);
  void power_off();
  bool powered() const { return powered_; }
  bool ready(std::int64_t t_ms) const { return powered_ && t_ms >= ready_at_; }
  std::optional<Frame> capture(std::int64_t t_ms);
  const CameraConfig& config() const { return cfg_; }
  std::int64_t frames() const { return frames_; }

 private:
  CameraConfig cfg_;
  bool powered_ = false;
  std::int64_t ready_at_ = 0;
  Cadence cadence_;
  std::int64_t frames_ = 0;
};

// Ground-truth detector: projects every scene object, confidence decays with
// distance, optional jitter and spurious boxes. Detection ids are scene indices.
std::vector<Detection> stub_detect(const Frame& frame, const std::vector<SceneObject>& scene,
                                   const CameraConfig& cam, Rng& rng);

// Palm IMU stream: rest pose plus a half-sine pulse for every scripted tilt.
class ImuSynth {
 public:
  struct Pulse {
    std::int64_t start_ms;
    GestureClass cls;
  };
  ImuSynth(std::vector<Pulse> pulses, GestureGenConfig cfg) : pulses_(std::move(pulses)), cfg_(cfg) {}
  ImuSample sample(std::int64_t t_ms, Rng& rng) const;
  // Noise-free gyro-x at t.
  double gyro_x(double t_ms) const;
  double tilt_deg(double t_ms) const;

 private:
  std::vector<Pulse> pulses_;
  GestureGenConfig cfg_;
};

}  // namespace graspstack

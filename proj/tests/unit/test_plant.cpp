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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include "graspstack/plant.hpp"
#include "graspstack/rng.hpp"

namespace gs = graspstack;

namespace {

gs::ServoCommand full_close(double ceiling = 1.0) {
  gs::ServoCommand c;
  c.target.fill(1.0);
  c.force_ceiling.fill(ceiling);
  return c;
}

// Milliseconds until every group satisfies `done`, stepping at `dt`.
template <class Done>
double time_until(gs::HandState h, const gs::ServoCommand& cmd, const gs::SceneObject* obj, double dt,
                  Done done, const gs::PlantConfig& cfg = {}) {
  double t = 0.0;
  while (!done(h) && t < 10'000.0) {
    h = gs::plant_step(h, cmd, obj, dt, cfg);
    t += dt;
  }
  return t;
}

}  // namespace

TEST(PlantConfig, CapAndContactPoint) {
  gs::PlantConfig cfg;
  EXPECT_DOUBLE_EQ(cfg.force_cap_n(), 5.0);
  EXPECT_DOUBLE_EQ(cfg.contact_point(28.0), 0.65);
  EXPECT_DOUBLE_EQ(cfg.contact_point(200.0), 0.0);
  EXPECT_DOUBLE_EQ(cfg.contact_point(0.0), 1.0);
  cfg.stall_torque_kgcm = 3.0;  // weaker servo: stall-limited below 5 N
  EXPECT_LT(cfg.force_cap_n(), 5.0);
}

TEST(PlantStep, FullCloseTakes1500ms) {
  for (double dt : {10.0, 5.0, 20.0}) {
    const double t = time_until({}, full_close(), nullptr, dt,
                                [](const gs::HandState& h) { return h.closure[0] >= 1.0 && h.closure[2] >= 1.0; });
    EXPECT_NEAR(t, 1500.0, dt) << "dt " << dt;
  }
}

TEST(PlantStep, FullOpenTakes600ms) {
  gs::HandState closed;
  closed.closure.fill(1.0);
  const double t = time_until(closed, gs::ServoCommand::open(), nullptr, 10.0,
                              [](const gs::HandState& h) { return h.closure[1] <= 0.0; });
  EXPECT_NEAR(t, 600.0, 10.0);
}

TEST(PlantStep, ForceSaturatesAtCapExactly) {
  gs::PlantConfig cfg;
  cfg.contact_stiffness_n = 50.0;  // 0.1 closure past contact = 5 N
  gs::SceneObject bottle;
  bottle.class_id = 2;
  bottle.width_mm = 32.0;  // contact point 0.6
  ASSERT_DOUBLE_EQ(cfg.contact_point(bottle.width_mm), 0.6);
  gs::HandState h;
  for (int i = 0; i < 300; ++i) h = gs::plant_step(h, full_close(), &bottle, 10.0, cfg);
  for (double f : h.contact_force_n) EXPECT_EQ(f, 5.0);
  for (double c : h.closure) EXPECT_NEAR(c, 0.7, 1e-12);
}

TEST(PlantStep, StallsAtCeiling) {
  gs::PlantConfig cfg;
  gs::SceneObject obj;
  obj.width_mm = 28.0;
  gs::HandState h;
  for (int i = 0; i < 300; ++i) h = gs::plant_step(h, full_close(0.8), &obj, 10.0, cfg);
  for (double f : h.contact_force_n) EXPECT_NEAR(f, 4.0, 1e-9);
  // holding keeps the force
  const auto held = gs::plant_step(h, gs::ServoCommand::hold(h, 0.8), &obj, 10.0, cfg);
  EXPECT_EQ(held.contact_force_n, h.contact_force_n);
  // a lower ceiling backs the servo off
  auto eased = h;
  for (int i = 0; i < 50; ++i) eased = gs::plant_step(eased, gs::ServoCommand::hold(eased, 0.4), &obj, 10.0, cfg);
  EXPECT_NEAR(eased.contact_force_n[0], 2.0, 1e-9);
}

TEST(PlantStep, SlewBoundAndForceMonotoneUnderRandomCommands) {
  gs::PlantConfig cfg;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    gs::Rng rng(seed);
    gs::SceneObject obj;
    obj.width_mm = rng.uniform(5.0, 70.0);
    const bool closing_only = seed % 2 == 0;
    gs::HandState h;
    gs::ServoCommand cmd = full_close(rng.uniform(0.1, 1.0));
    const double contact = cfg.contact_point(obj.width_mm);
    for (int step = 0; step < 300; ++step) {
      const double dt = rng.uniform(1.0, 50.0);
      if (!closing_only && step % 25 == 0) {
        for (auto& t : cmd.target) t = rng.uniform();
        for (auto& c : cmd.force_ceiling) c = rng.uniform();
      }
      const auto next = gs::plant_step(h, cmd, &obj, dt, cfg);
      for (std::size_t g = 0; g < 3; ++g) {
        EXPECT_LE(std::abs(next.closure[g] - h.closure[g]), dt / 600.0 + 1e-12);
        EXPECT_GE(next.closure[g], 0.0);
        EXPECT_LE(next.closure[g], 1.0);
      }
      for (std::size_t f = 0; f < 5; ++f) {
        const auto g = gs::group_of_finger(f);
        EXPECT_GE(next.contact_force_n[f], 0.0);
        EXPECT_LE(next.contact_force_n[f], 5.0);
        if (next.closure[g] <= contact) {
          EXPECT_EQ(next.contact_force_n[f], 0.0);
        }
        if (closing_only) {
          EXPECT_GE(next.contact_force_n[f], h.contact_force_n[f]);
        }
      }
      h = next;
    }
  }
}

TEST(PlantStep, NoObjectNoForceAndClampedDt) {
  gs::HandState h;
  h = gs::plant_step(h, full_close(), nullptr, 1000.0);  // clamped to 50 ms
  EXPECT_NEAR(h.closure[0], 50.0 / 1500.0, 1e-12);
  for (double f : h.contact_force_n) EXPECT_EQ(f, 0.0);
}

TEST(GenGesture, TiltRightPeakAtCentreWithoutNoise) {
  gs::GestureGenConfig cfg;
  cfg.gyro_noise_dps = 0.0;
  cfg.accel_noise_g = 0.0;
  auto w = gs::gen_gesture(gs::GestureClass::TiltRight, 1, cfg);
  ASSERT_EQ(w.samples.shape(), (gs::Shape{60, 6}));
  std::size_t best = 0;
  for (std::size_t t = 0; t < 60; ++t)
    if (w.samples[t * 6 + 3] > w.samples[best * 6 + 3]) best = t;
  EXPECT_EQ(best, 30u);
  EXPECT_NEAR(w.samples[30 * 6 + 3], 120.0, 1e-9);
  auto left = gs::gen_gesture(gs::GestureClass::TiltLeft, 1, cfg);
  EXPECT_NEAR(left.samples[30 * 6 + 3], -120.0, 1e-9);
  // gravity stays unit length
  for (std::size_t t = 0; t < 60; ++t) {
    const double ay = w.samples[t * 6 + 1], az = w.samples[t * 6 + 2];
    EXPECT_NEAR(ay * ay + az * az, 1.0, 1e-12);
  }
  // pulse is 0.5 s wide: zero outside +/- 7.5 samples of the centre
  EXPECT_EQ(w.samples[20 * 6 + 3], 0.0);
  EXPECT_EQ(w.samples[40 * 6 + 3], 0.0);
}

TEST(GenGesture, NoActionIsZeroMeanNoise) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto w = gs::gen_gesture(gs::GestureClass::NoAction, seed);
    for (std::size_t c = 3; c < 6; ++c) {
      double mean = 0.0;
      for (std::size_t t = 0; t < 60; ++t) mean += w.samples[t * 6 + c];
      mean /= 60.0;
      EXPECT_LT(std::abs(mean), 3.0 * 5.0 / std::sqrt(60.0)) << "seed " << seed << " channel " << c;
    }
  }
}

TEST(GenGesture, DeterministicPerSeedAndDatasetShape) {
  EXPECT_EQ(gs::gen_gesture(gs::GestureClass::TiltLeft, 9).samples,
            gs::gen_gesture(gs::GestureClass::TiltLeft, 9).samples);
  EXPECT_NE(gs::gen_gesture(gs::GestureClass::TiltLeft, 9).samples,
            gs::gen_gesture(gs::GestureClass::TiltLeft, 10).samples);
  auto data = gs::make_gesture_dataset(220, 1);
  ASSERT_EQ(data.size(), 660u);
  std::array<int, 3> counts{};
  for (const auto& w : data) ++counts[static_cast<std::size_t>(*w.label)];
  EXPECT_EQ(counts, (std::array<int, 3>{220, 220, 220}));
}

TEST(Tof, ReadingsAndRange) {
  gs::SceneObject obj;
  obj.distance_mm = 80.0;
  EXPECT_EQ(gs::tof_read(&obj, 0.0, 1), 80.0);
  EXPECT_FALSE(gs::tof_read(nullptr, 0.0, 1).has_value());
  obj.distance_mm = 250.0;
  EXPECT_FALSE(gs::tof_read(&obj, 0.0, 1).has_value());
  obj.distance_mm = 0.5;
  gs::Rng rng(2);
  for (int i = 0; i < 100; ++i) EXPECT_GE(*gs::tof_read(&obj, 0.5, 5.0, rng), 0.0);
}

TEST(Tof, NoiseSigmaStatistics) {
  gs::SceneObject obj;
  obj.distance_mm = 100.0;
  gs::Rng rng(77);
  double s = 0, s2 = 0;
  for (int i = 0; i < 1000; ++i) {
    const double d = *gs::tof_read(&obj, obj.distance_mm, 3.0, rng);
    s += d;
    s2 += d * d;
  }
  const double sigma = std::sqrt(s2 / 1000.0 - (s / 1000.0) * (s / 1000.0));
  EXPECT_GE(sigma, 2.5);
  EXPECT_LE(sigma, 3.5);
}

TEST(ForceRead, NoiseAroundTruth) {
  gs::HandState free, saturated;
  saturated.contact_force_n.fill(5.0);
  gs::Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    EXPECT_LE(gs::force_read(free, i % 5, gs::kForceNoiseN, rng), 3 * gs::kForceNoiseN + 0.05);
    EXPECT_NEAR(gs::force_read(saturated, i % 5, gs::kForceNoiseN, rng), 5.0, 4 * gs::kForceNoiseN);
  }
  EXPECT_THROW(gs::force_read(free, 5, 0.0, rng), std::out_of_range);
}

TEST(Cadence, NinePerSecondAndThirtyHertz) {
  gs::Cadence cam(9, 0);
  int frames = 0;
  for (std::int64_t t = 0; t < 1000; t += 10) frames += cam.due(t);
  EXPECT_EQ(frames, 9);
  gs::Cadence imu(30, 0);
  int samples = 0;
  for (std::int64_t t = 0; t < 10'000; t += 10) samples += imu.due(t);
  EXPECT_EQ(samples, 300);
}

TEST(Cadence, NeverDrifts) {
  for (int hz : {9, 30, 7}) {
    for (std::int64_t tick : {1, 10, 20, 50}) {
      if (1000 / hz < tick) continue;
      gs::Cadence c(hz, 130);
      std::vector<std::int64_t> fired;
      for (std::int64_t t = 0; t < 20'000; t += tick)
        if (c.due(t)) fired.push_back(t);
      const double period = 1000.0 / hz;
      // tick-aligned windows, as the simulation only observes tick instants
      for (std::int64_t a0 = 130; a0 + 3000 <= 20'000; a0 += 377) {
        const std::int64_t a = a0 / tick * tick;
        for (std::int64_t len : {500, 1000, 3000}) {
          const auto n = std::count_if(fired.begin(), fired.end(), [&](std::int64_t t) { return t >= a && t < a + len; });
          const auto lo = static_cast<long>(std::floor(len / period));
          EXPECT_GE(n, lo) << hz << " " << tick << " " << a << " " << len;
          EXPECT_LE(n, lo + 1) << hz << " " << tick << " " << a << " " << len;
        }
      }
    }
  }
}

TEST(Camera, InitDelayAndFrameRate) {
  gs::Camera cam;
  EXPECT_FALSE(cam.capture(0).has_value());
  cam.power_on(1000, 300);
  int frames = 0;
  std::int64_t first = -1;
  for (std::int64_t t = 1000; t < 2300; t += 10) {
    if (auto f = cam.capture(t)) {
      if (first < 0) first = f->t_ms;
      ++frames;
    }
  }
  EXPECT_EQ(first, 1300);
  EXPECT_EQ(frames, 9);
  cam.power_off();
  EXPECT_FALSE(cam.capture(2400).has_value());
}

TEST(StubDetect, ProjectionAndConfidence) {
  gs::CameraConfig cam;
  gs::SceneObject bottle, pen;
  bottle.class_id = 2;
  bottle.distance_mm = 100.0;
  bottle.width_mm = 30.0;
  bottle.height_mm = 60.0;
  pen.class_id = 3;
  pen.distance_mm = 300.0;
  pen.width_mm = 30.0;
  pen.height_mm = 60.0;
  gs::Rng rng(1);
  auto d = gs::stub_detect({0, 0}, {bottle, pen}, cam, rng);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_GT(d[0].bbox.area(), d[1].bbox.area());
  EXPECT_NEAR(d[0].confidence, 0.95 - 0.0005 * 100.0, 1e-12);
  EXPECT_GT(d[0].confidence, d[1].confidence);
  EXPECT_EQ(d[0].id, 0);
  EXPECT_EQ(d[1].id, 1);
  EXPECT_TRUE(gs::stub_detect({0, 0}, {}, cam, rng).empty());
}

TEST(StubDetect, AreaShrinksWithDistance) {
  gs::CameraConfig cam;
  gs::SceneObject o;
  o.width_mm = 40;
  o.height_mm = 90;
  double prev = 2.0;
  for (double d = 20; d <= 1000; d += 10) {
    const double a = gs::project_bbox(o, d, cam).area();
    EXPECT_LE(a, prev);
    prev = a;
  }
}

TEST(StubDetect, FalsePositivesInjected) {
  gs::CameraConfig cam;
  cam.false_positive_rate = 1.0;
  gs::Rng rng(3);
  auto d = gs::stub_detect({4, 0}, {}, cam, rng);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_LT(d[0].id, -1);
  EXPECT_LT(d[0].class_id, 6u);
}

TEST(ImuSynth, RestPoseAndPulse) {
  gs::GestureGenConfig cfg;
  gs::ImuSynth synth({{1000, gs::GestureClass::TiltLeft}}, cfg);
  EXPECT_EQ(synth.gyro_x(500), 0.0);
  EXPECT_NEAR(synth.gyro_x(1250), -120.0, 1e-9);
  EXPECT_NEAR(synth.tilt_deg(2000), -120.0 * 0.5 / M_PI * 2.0, 1e-9);
  cfg.gyro_noise_dps = 0;
  cfg.accel_noise_g = 0;
  gs::ImuSynth quiet({}, cfg);
  gs::Rng rng(1);
  auto s = quiet.sample(100, rng);
  EXPECT_EQ(s.accel, (std::array<double, 3>{0.0, 0.0, 1.0}));
  EXPECT_EQ(s.gyro, (std::array<double, 3>{0.0, 0.0, 0.0}));
}

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

#include "graspstack/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "graspstack/grasp.hpp"

namespace graspstack {

using nlohmann::json;

namespace {

std::string type_name(const json& j) { return j.type_name(); }

// Walks one JSON object, handing each known key to its reader and rejecting
// the rest.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(path_, "expected object, got " + type_name(j_));
  }

  template <class F>
  Fields& opt(const std::string& key, F&& read) {
    known_.insert(key);
    if (auto it = j_.find(key); it != j_.end()) read(*it, path_ + "." + key);
    return *this;
  }

  template <class F>
  Fields& req(const std::string& key, F&& read) {
    known_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) throw SchemaError(path_ + "." + key, "required field is missing");
    read(*it, path_ + "." + key);
    return *this;
  }

  void close() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!known_.contains(it.key())) throw SchemaError(path_ + "." + it.key(), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> known_;
};

double num(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected number, got " + type_name(j));
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(path, "expected a finite number");
  return v;
}

double non_negative(const json& j, const std::string& path) {
  const double v = num(j, path);
  if (v < 0.0) throw SchemaError(path, "must be >= 0");
  return v;
}

double positive(const json& j, const std::string& path) {
  const double v = num(j, path);
  if (v <= 0.0) throw SchemaError(path, "must be > 0");
  return v;
}

double unit(const json& j, const std::string& path) {
  const double v = num(j, path);
  if (v < 0.0 || v > 1.0) throw SchemaError(path, "must be in [0, 1]");
  return v;
}

std::int64_t integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected integer, got " + type_name(j));
  return j.get<std::int64_t>();
}

std::int64_t ms(const json& j, const std::string& path) {
  const std::int64_t v = integer(j, path);
  if (v < 0) throw SchemaError(path, "must be >= 0");
  return v;
}

std::int64_t positive_ms(const json& j, const std::string& path) {
  const std::int64_t v = integer(j, path);
  if (v <= 0) throw SchemaError(path, "must be > 0");
  return v;
}

std::string str(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected string, got " + type_name(j));
  return j.get<std::string>();
}

GestureClass gesture(const json& j, const std::string& path) {
  const std::string s = str(j, path);
  auto g = gesture_from_string(s);
  if (!g) throw SchemaError(path, "unknown gesture '" + s + "'");
  return *g;
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected array, got " + type_name(j));
  return j;
}

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

SceneObject parse_object(const json& j, const std::string& path) {
  SceneObject o;
  Fields(j, path)
      .req("class",
           [&](const json& v, const std::string& p) {
             const std::string name = str(v, p);
             auto id = object_from_name(name);
             if (!id) throw SchemaError(p, "unknown object class '" + name + "'");
             o.class_id = *id;
           })
      .opt("distance_mm", [&](const json& v, const std::string& p) { o.distance_mm = non_negative(v, p); })
      .opt("width_mm", [&](const json& v, const std::string& p) { o.width_mm = positive(v, p); })
      .opt("height_mm", [&](const json& v, const std::string& p) { o.height_mm = positive(v, p); })
      .opt("breaking_force_n", [&](const json& v, const std::string& p) { o.breaking_force_n = positive(v, p); })
      .opt("image_x", [&](const json& v, const std::string& p) { o.image_x = unit(v, p); })
      .opt("image_y", [&](const json& v, const std::string& p) { o.image_y = unit(v, p); })
      .opt("approach_mm_per_s",
           [&](const json& v, const std::string& p) { o.approach_mm_per_s = non_negative(v, p); })
      .close();
  return o;
}

void parse_controller(const json& j, const std::string& path, ControllerConfig& c) {
  Fields(j, path)
      .opt("camera_init_ms", [&](const json& v, const std::string& p) { c.camera_init_ms = positive_ms(v, p); })
      .opt("reach_threshold_mm", [&](const json& v, const std::string& p) { c.reach_threshold_mm = positive(v, p); })
      .opt("grasp_timeout_ms", [&](const json& v, const std::string& p) { c.grasp_timeout_ms = positive_ms(v, p); })
      .opt("detect_timeout_ms", [&](const json& v, const std::string& p) { c.detect_timeout_ms = positive_ms(v, p); })
      .opt("force_margin",
           [&](const json& v, const std::string& p) {
             c.force_margin = unit(v, p);
             if (c.force_margin == 0.0) throw SchemaError(p, "must be > 0");
           })
      .opt("activation_gesture", [&](const json& v, const std::string& p) { c.activation_gesture = gesture(v, p); })
      .opt("release_gesture", [&](const json& v, const std::string& p) { c.release_gesture = gesture(v, p); })
      .opt("correction_gesture", [&](const json& v, const std::string& p) { c.correction_gesture = gesture(v, p); })
      .opt("correction_window_ms",
           [&](const json& v, const std::string& p) { c.correction_window_ms = positive_ms(v, p); })
      .opt("conf_threshold", [&](const json& v, const std::string& p) { c.conf_threshold = unit(v, p); })
      .opt("nms_iou", [&](const json& v, const std::string& p) { c.nms_iou = unit(v, p); })
      .close();
}

void parse_plant(const json& j, const std::string& path, PlantConfig& c) {
  Fields(j, path)
      .opt("close_full_ms", [&](const json& v, const std::string& p) { c.close_full_ms = positive(v, p); })
      .opt("open_full_ms", [&](const json& v, const std::string& p) { c.open_full_ms = positive(v, p); })
      .opt("aperture_mm", [&](const json& v, const std::string& p) { c.aperture_mm = positive(v, p); })
      .opt("contact_stiffness_n", [&](const json& v, const std::string& p) { c.contact_stiffness_n = positive(v, p); })
      .opt("max_force_n", [&](const json& v, const std::string& p) { c.max_force_n = positive(v, p); })
      .opt("stall_torque_kgcm", [&](const json& v, const std::string& p) { c.stall_torque_kgcm = positive(v, p); })
      .opt("finger_lever_mm", [&](const json& v, const std::string& p) { c.finger_lever_mm = positive(v, p); })
      .close();
}

void parse_camera(const json& j, const std::string& path, CameraConfig& c) {
  Fields(j, path)
      .opt("fps",
           [&](const json& v, const std::string& p) {
             const std::int64_t fps = positive_ms(v, p);
             if (fps > 1000) throw SchemaError(p, "must be <= 1000");
             c.fps = static_cast<int>(fps);
           })
      .opt("focal", [&](const json& v, const std::string& p) { c.focal = positive(v, p); })
      .opt("confidence_base", [&](const json& v, const std::string& p) { c.confidence_base = unit(v, p); })
      .opt("confidence_decay_per_mm",
           [&](const json& v, const std::string& p) { c.confidence_decay_per_mm = non_negative(v, p); })
      .opt("jitter", [&](const json& v, const std::string& p) { c.jitter = non_negative(v, p); })
      .opt("false_positive_rate", [&](const json& v, const std::string& p) { c.false_positive_rate = unit(v, p); })
      .close();
}

void parse_noise(const json& j, const std::string& path, NoiseConfig& c) {
  Fields(j, path)
      .opt("force_sigma_n", [&](const json& v, const std::string& p) { c.force_sigma_n = non_negative(v, p); })
      .opt("tof_sigma_mm", [&](const json& v, const std::string& p) { c.tof_sigma_mm = non_negative(v, p); })
      .opt("imu_gyro_dps", [&](const json& v, const std::string& p) { c.imu_gyro_dps = non_negative(v, p); })
      .opt("imu_accel_g", [&](const json& v, const std::string& p) { c.imu_accel_g = non_negative(v, p); })
      .close();
}

void parse_power(const json& j, const std::string& path, Scenario& s) {
  Fields(j, path)
      .opt("battery",
           [&](const json& b, const std::string& bp) {
             double fraction = 1.0;
             Fields(b, bp)
                 .opt("voltage", [&](const json& v, const std::string& p) { s.battery.nominal_voltage = positive(v, p); })
                 .opt("capacity_mah", [&](const json& v, const std::string& p) { s.battery.capacity_mah = positive(v, p); })
                 .opt("initial_fraction", [&](const json& v, const std::string& p) { fraction = unit(v, p); })
                 .close();
             s.battery.remaining_mwh = fraction * s.battery.capacity_mwh();
           })
      .opt("modules",
           [&](const json& m, const std::string& mp) {
             if (!m.is_object()) throw SchemaError(mp, "expected object, got " + type_name(m));
             for (auto it = m.begin(); it != m.end(); ++it) {
               const std::string p = mp + "." + it.key();
               auto mod = module_from_name(it.key());
               if (!mod) throw SchemaError(p, "unknown module");
               ModuleDraw& d = s.power.draw[static_cast<std::size_t>(*mod)];
               Fields(*it, p)
                   .opt("sleep_mw", [&](const json& v, const std::string& q) { d.sleep_mw = non_negative(v, q); })
                   .opt("idle_mw", [&](const json& v, const std::string& q) { d.idle_mw = non_negative(v, q); })
                   .opt("active_mw", [&](const json& v, const std::string& q) { d.active_mw = non_negative(v, q); })
                   .close();
               if (!(d.sleep_mw <= d.idle_mw && d.idle_mw <= d.active_mw)) {
                 throw SchemaError(p, "draws must satisfy sleep <= idle <= active");
               }
             }
           })
      .close();
}

}  // namespace

Scenario parse_scenario(const json& j) {
  Scenario s;
  Fields(j, "$")
      .req("version",
           [&](const json& v, const std::string& p) {
             const std::int64_t ver = integer(v, p);
             if (ver != kScenarioVersion) {
               throw SchemaError(p, "unsupported version " + std::to_string(ver) + ", expected " +
                                        std::to_string(kScenarioVersion));
             }
           })
      .opt("name", [&](const json& v, const std::string& p) { s.name = str(v, p); })
      .opt("seed",
           [&](const json& v, const std::string& p) {
             if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
               throw SchemaError(p, "expected non-negative integer");
             }
             s.seed = v.get<std::uint64_t>();
           })
      .opt("duration_ms", [&](const json& v, const std::string& p) { s.duration_ms = positive_ms(v, p); })
      .opt("tick_ms",
           [&](const json& v, const std::string& p) {
             s.tick_ms = positive_ms(v, p);
             if (s.tick_ms > 50) throw SchemaError(p, "must be <= 50");
           })
      .opt("donned_at_ms", [&](const json& v, const std::string& p) { s.donned_at_ms = ms(v, p); })
      .opt("doffed_at_ms", [&](const json& v, const std::string& p) { s.doffed_at_ms = ms(v, p); })
      .opt("scene",
           [&](const json& v, const std::string& p) {
             for (std::size_t i = 0; i < array(v, p).size(); ++i) s.scene.push_back(parse_object(v[i], at(p, i)));
           })
      .opt("gestures",
           [&](const json& v, const std::string& p) {
             for (std::size_t i = 0; i < array(v, p).size(); ++i) {
               ScriptedGesture g;
               Fields(v[i], at(p, i))
                   .req("t_ms", [&](const json& x, const std::string& q) { g.t_ms = ms(x, q); })
                   .req("gesture", [&](const json& x, const std::string& q) { g.gesture = gesture(x, q); })
                   .close();
               if (!s.gestures.empty() && g.t_ms < s.gestures.back().t_ms) {
                 throw SchemaError(at(p, i) + ".t_ms", "gesture script must be sorted by time");
               }
               s.gestures.push_back(g);
             }
           })
      .opt("events",
           [&](const json& v, const std::string& p) {
             for (std::size_t i = 0; i < array(v, p).size(); ++i) {
               ScriptedEvent e;
               Fields(v[i], at(p, i))
                   .req("t_ms", [&](const json& x, const std::string& q) { e.t_ms = ms(x, q); })
                   .req("kind", [&](const json& x, const std::string& q) { e.kind = str(x, q); })
                   .close();
               s.events.push_back(e);
             }
           })
      .opt("gesture_source",
           [&](const json& v, const std::string& p) {
             const std::string src = str(v, p);
             if (src == "script") {
               s.gesture_source = GestureSource::Script;
             } else if (src == "model") {
               s.gesture_source = GestureSource::Model;
             } else {
               throw SchemaError(p, "expected \"script\" or \"model\", got '" + src + "'");
             }
           })
      .opt("controller", [&](const json& v, const std::string& p) { parse_controller(v, p, s.controller); })
      .opt("plant", [&](const json& v, const std::string& p) { parse_plant(v, p, s.plant); })
      .opt("camera", [&](const json& v, const std::string& p) { parse_camera(v, p, s.camera); })
      .opt("noise", [&](const json& v, const std::string& p) { parse_noise(v, p, s.noise); })
      .opt("power", [&](const json& v, const std::string& p) { parse_power(v, p, s); })
      .close();
  if (s.doffed_at_ms && *s.doffed_at_ms < s.donned_at_ms) {
    throw SchemaError("$.doffed_at_ms", "must not precede donned_at_ms");
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("$", "cannot open scenario file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(j);
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["version"] = kScenarioVersion;
  j["name"] = s.name;
  j["seed"] = s.seed;
  j["duration_ms"] = s.duration_ms;
  j["tick_ms"] = s.tick_ms;
  j["donned_at_ms"] = s.donned_at_ms;
  if (s.doffed_at_ms) j["doffed_at_ms"] = *s.doffed_at_ms;
  j["scene"] = json::array();
  for (const SceneObject& o : s.scene) {
    j["scene"].push_back({{"class", std::string(object_name(o.class_id))},
                          {"distance_mm", o.distance_mm},
                          {"width_mm", o.width_mm},
                          {"height_mm", o.height_mm},
                          {"breaking_force_n", o.breaking_force_n},
                          {"image_x", o.image_x},
                          {"image_y", o.image_y},
                          {"approach_mm_per_s", o.approach_mm_per_s}});
  }
  j["gestures"] = json::array();
  for (const ScriptedGesture& g : s.gestures) {
    j["gestures"].push_back({{"t_ms", g.t_ms}, {"gesture", std::string(to_string(g.gesture))}});
  }
  j["events"] = json::array();
  for (const ScriptedEvent& e : s.events) j["events"].push_back({{"t_ms", e.t_ms}, {"kind", e.kind}});
  j["gesture_source"] = s.gesture_source == GestureSource::Model ? "model" : "script";
  const ControllerConfig& c = s.controller;
  j["controller"] = {{"camera_init_ms", c.camera_init_ms},
                     {"reach_threshold_mm", c.reach_threshold_mm},
                     {"grasp_timeout_ms", c.grasp_timeout_ms},
                     {"detect_timeout_ms", c.detect_timeout_ms},
                     {"force_margin", c.force_margin},
                     {"activation_gesture", std::string(to_string(c.activation_gesture))},
                     {"release_gesture", std::string(to_string(c.release_gesture))},
                     {"correction_gesture", std::string(to_string(c.correction_gesture))},
                     {"correction_window_ms", c.correction_window_ms},
                     {"conf_threshold", c.conf_threshold},
                     {"nms_iou", c.nms_iou}};
  const PlantConfig& pl = s.plant;
  j["plant"] = {{"close_full_ms", pl.close_full_ms},         {"open_full_ms", pl.open_full_ms},
                {"aperture_mm", pl.aperture_mm},             {"contact_stiffness_n", pl.contact_stiffness_n},
                {"max_force_n", pl.max_force_n},             {"stall_torque_kgcm", pl.stall_torque_kgcm},
                {"finger_lever_mm", pl.finger_lever_mm}};
  j["camera"] = {{"fps", s.camera.fps},
                 {"focal", s.camera.focal},
                 {"confidence_base", s.camera.confidence_base},
                 {"confidence_decay_per_mm", s.camera.confidence_decay_per_mm},
                 {"jitter", s.camera.jitter},
                 {"false_positive_rate", s.camera.false_positive_rate}};
  j["noise"] = {{"force_sigma_n", s.noise.force_sigma_n},
                {"tof_sigma_mm", s.noise.tof_sigma_mm},
                {"imu_gyro_dps", s.noise.imu_gyro_dps},
                {"imu_accel_g", s.noise.imu_accel_g}};
  json modules;
  for (std::size_t i = 0; i < kModules; ++i) {
    const ModuleDraw& d = s.power.draw[i];
    modules[std::string(module_name(static_cast<Module>(i)))] = {
        {"sleep_mw", d.sleep_mw}, {"idle_mw", d.idle_mw}, {"active_mw", d.active_mw}};
  }
  j["power"] = {{"battery",
                 {{"voltage", s.battery.nominal_voltage},
                  {"capacity_mah", s.battery.capacity_mah},
                  {"initial_fraction", s.battery.fraction()}}},
                {"modules", modules}};
  return j;
}

}  // namespace graspstack

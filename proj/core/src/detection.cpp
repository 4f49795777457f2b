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

#include "graspstack/detection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace graspstack {

double& YoloHead::at(std::size_t row, std::size_t col, std::size_t anchor, std::size_t field) {
  return raw[((row * grid + col) * anchors.size() + anchor) * stride() + field];
}

double YoloHead::at(std::size_t row, std::size_t col, std::size_t anchor, std::size_t field) const {
  return raw[((row * grid + col) * anchors.size() + anchor) * stride() + field];
}

YoloHead YoloHead::zeros(std::size_t grid, std::vector<std::pair<double, double>> anchors,
                         double input_size, std::size_t num_classes) {
  YoloHead h;
  h.grid = grid;
  h.num_classes = num_classes;
  h.anchors = std::move(anchors);
  h.input_size = input_size;
  h.raw.assign(grid * grid * h.anchors.size() * h.stride(), 0.0);
  return h;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<Detection> decode_yolo(const YoloHead& head, double conf_threshold) {
  if (!(conf_threshold >= 0.0 && conf_threshold <= 1.0)) {
    throw std::invalid_argument("confidence threshold must be in [0, 1]");
  }
  if (head.anchors.empty() || head.grid == 0 || !(head.input_size > 0.0)) {
    throw std::invalid_argument("YOLO head needs a grid, anchors and an input size");
  }
  if (head.raw.size() != head.grid * head.grid * head.anchors.size() * head.stride()) {
    throw std::invalid_argument("YOLO head raw size does not match its layout");
  }
  for (double v : head.raw) {
    if (!std::isfinite(v)) throw std::invalid_argument("YOLO head contains non-finite scores");
  }
  const double g = static_cast<double>(head.grid);
  std::vector<Detection> out;
  int next_id = 0;
  for (std::size_t i = 0; i < head.grid; ++i) {
    for (std::size_t j = 0; j < head.grid; ++j) {
      for (std::size_t a = 0; a < head.anchors.size(); ++a) {
        std::size_t best = 0;
        double best_score = -1.0;
        for (std::size_t c = 0; c < head.num_classes; ++c) {
          const double s = sigmoid(head.at(i, j, a, 5 + c));
          if (s > best_score) {
            best_score = s;
            best = c;
          }
        }
        const double conf = sigmoid(head.at(i, j, a, 4)) * best_score;
        if (conf < conf_threshold) continue;
        const double sw = 2.0 * sigmoid(head.at(i, j, a, 2));
        const double sh = 2.0 * sigmoid(head.at(i, j, a, 3));
        Detection d;
        d.class_id = best;
        d.confidence = conf;
        d.bbox.cx = std::clamp((2.0 * sigmoid(head.at(i, j, a, 0)) - 0.5 + j) / g, 0.0, 1.0);
        d.bbox.cy = std::clamp((2.0 * sigmoid(head.at(i, j, a, 1)) - 0.5 + i) / g, 0.0, 1.0);
        d.bbox.w = std::min(sw * sw * head.anchors[a].first / head.input_size, 1.0);
        d.bbox.h = std::min(sh * sh * head.anchors[a].second / head.input_size, 1.0);
        d.id = next_id++;
        out.push_back(d);
      }
    }
  }
  return out;
}

double iou(const BBox& a, const BBox& b) {
  if (a.area() <= 0.0 || b.area() <= 0.0) return 0.0;
  // areas from the same corners as the intersection, so iou(a, a) is exactly 1
  const double ax0 = a.cx - a.w / 2, ax1 = a.cx + a.w / 2, ay0 = a.cy - a.h / 2, ay1 = a.cy + a.h / 2;
  const double bx0 = b.cx - b.w / 2, bx1 = b.cx + b.w / 2, by0 = b.cy - b.h / 2, by1 = b.cy + b.h / 2;
  const double ix = std::min(ax1, bx1) - std::max(ax0, bx0);
  const double iy = std::min(ay1, by1) - std::max(ay0, by0);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  return inter / ((ax1 - ax0) * (ay1 - ay0) + (bx1 - bx0) * (by1 - by0) - inter);
}

bool nms_ranks_before(const Detection& a, const Detection& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.class_id != b.class_id) return a.class_id < b.class_id;
  return a.bbox.cx < b.bbox.cx;
}

std::vector<Detection> nms(std::vector<Detection> dets, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw std::invalid_argument("NMS IoU threshold must be in (0, 1]");
  }
  std::stable_sort(dets.begin(), dets.end(), nms_ranks_before);
  std::vector<Detection> kept;
  for (const Detection& d : dets) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
      return k.class_id == d.class_id && iou(k.bbox, d.bbox) >= iou_threshold;
    });
    if (!suppressed) kept.push_back(d);
  }
  return kept;
}

MapResult evaluate_map(const std::vector<ImageDetections>& preds,
                       const std::vector<GroundTruth>& gts, double iou_thresh) {
  if (gts.empty()) throw std::invalid_argument("mAP is undefined for an empty ground-truth set");

  std::map<std::size_t, std::size_t> gt_count;
  for (const auto& g : gts) ++gt_count[g.class_id];

  MapResult res;
  for (const auto& [cls, n_gt] : gt_count) {
    struct Ranked {
      double conf;
      std::size_t order;
      const std::string* image;
      BBox box;
    };
    std::vector<Ranked> ranked;
    std::size_t order = 0;
    for (const auto& img : preds) {
      for (const auto& d : img.detections) {
        if (d.class_id == cls) ranked.push_back({d.confidence, order, &img.image_id, d.bbox});
        ++order;
      }
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const Ranked& a, const Ranked& b) { return a.conf > b.conf; });

    std::vector<const GroundTruth*> cls_gts;
    for (const auto& g : gts) {
      if (g.class_id == cls) cls_gts.push_back(&g);
    }
    std::vector<bool> matched(cls_gts.size(), false);
    std::vector<double> precision, recall;
    std::size_t tp = 0, fp = 0;
    for (const Ranked& r : ranked) {
      // best-overlapping unmatched ground truth in the same image
      double best = -1.0;
      std::size_t best_k = 0;
      for (std::size_t k = 0; k < cls_gts.size(); ++k) {
        if (matched[k] || cls_gts[k]->image_id != *r.image) continue;
        const double o = iou(r.box, cls_gts[k]->bbox);
        if (o > best) {
          best = o;
          best_k = k;
        }
      }
      if (best >= iou_thresh) {
        matched[best_k] = true;
        ++tp;
      } else {
        ++fp;
      }
      precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
      recall.push_back(static_cast<double>(tp) / static_cast<double>(n_gt));
    }

    // area under the monotone precision envelope
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < precision.size(); ++i) {
      if (recall[i] <= prev_recall) continue;
      double env = 0.0;
      for (std::size_t k = i; k < precision.size(); ++k) env = std::max(env, precision[k]);
      ap += (recall[i] - prev_recall) * env;
      prev_recall = recall[i];
    }
    res.per_class.push_back({cls, ap, n_gt});
    res.map += ap;
  }
  res.map /= static_cast<double>(res.per_class.size());
  return res;
}

std::optional<Detection> select_target(const std::vector<Detection>& dets,
                                       const std::set<int>& rejected) {
  std::optional<Detection> best;
  auto centre_dist = [](const Detection& d) {
    return std::hypot(d.bbox.cx - 0.5, d.bbox.cy - 0.5);
  };
  auto better = [&](const Detection& a, const Detection& b) {
    if (a.bbox.area() != b.bbox.area()) return a.bbox.area() > b.bbox.area();
    const double da = centre_dist(a), db = centre_dist(b);
    if (da != db) return da < db;
    if (a.class_id != b.class_id) return a.class_id < b.class_id;
    return a.id < b.id;
  };
  for (const Detection& d : dets) {
    if (rejected.contains(d.id)) continue;
    if (!best || better(d, *best)) best = d;
  }
  return best;
}

namespace {

template <class Fn>
void for_each_line(const std::filesystem::path& path, Fn fn) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
}

BBox box_from(const nlohmann::json& j) {
  return {j.at("cx").get<double>(), j.at("cy").get<double>(), j.at("w").get<double>(),
          j.at("h").get<double>()};
}

}  // namespace

std::vector<ImageDetections> read_detections_jsonl(const std::filesystem::path& path) {
  std::vector<ImageDetections> out;
  std::map<std::string, std::size_t> index;
  int next_id = 0;
  for_each_line(path, [&](const nlohmann::json& j) {
    const auto image = j.at("image_id").get<std::string>();
    auto [it, inserted] = index.try_emplace(image, out.size());
    if (inserted) out.push_back({image, {}});
    Detection d;
    d.class_id = j.at("class_id").get<std::size_t>();
    d.confidence = j.at("confidence").get<double>();
    d.bbox = box_from(j);
    d.id = next_id++;
    out[it->second].detections.push_back(d);
  });
  return out;
}

std::vector<GroundTruth> read_ground_truth_jsonl(const std::filesystem::path& path) {
  std::vector<GroundTruth> out;
  for_each_line(path, [&](const nlohmann::json& j) {
    out.push_back({j.at("image_id").get<std::string>(), j.at("class_id").get<std::size_t>(), box_from(j)});
  });
  return out;
}

void write_detections_jsonl(const std::vector<ImageDetections>& dets, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const auto& img : dets) {
    for (const auto& d : img.detections) {
      nlohmann::ordered_json j{{"image_id", img.image_id}, {"class_id", d.class_id},
                               {"confidence", d.confidence}, {"cx", d.bbox.cx},
                               {"cy", d.bbox.cy}, {"w", d.bbox.w}, {"h", d.bbox.h}};
      out << j.dump() << '\n';
    }
  }
}

void write_ground_truth_jsonl(const std::vector<GroundTruth>& gts, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const auto& g : gts) {
    nlohmann::ordered_json j{{"image_id", g.image_id}, {"class_id", g.class_id}, {"cx", g.bbox.cx},
                             {"cy", g.bbox.cy}, {"w", g.bbox.w}, {"h", g.bbox.h}};
    out << j.dump() << '\n';
  }
}

}  // namespace graspstack

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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "graspstack/tensor.hpp"

namespace graspstack {

inline constexpr double kDefaultConfThreshold = 0.25;
inline constexpr double kDefaultNmsIou = 0.45;
inline constexpr double kMapIouThreshold = 0.5;

// Center/size box in normalised image coordinates.
struct BBox {
  double cx = 0.0, cy = 0.0, w = 0.0, h = 0.0;
  double area() const { return w * h; }
  friend bool operator==(const BBox&, const BBox&) = default;
};

struct Detection {
  std::size_t class_id = 0;
  double confidence = 0.0;
  BBox bbox;
  // Identifies the detection for correction bookkeeping: the scene object
  // index from the stub detector, or the decode order for YOLO heads.
  int id = -1;
  friend bool operator==(const Detection&, const Detection&) = default;
};

struct GroundTruth {
  std::string image_id;
  std::size_t class_id = 0;
  BBox bbox;
};

struct ImageDetections {
  std::string image_id;
  std::vector<Detection> detections;
};

// Raw head output, laid out grid x grid x anchors x (5 + classes):
// tx, ty, tw, th, objectness, class logits.
struct YoloHead {
  std::size_t grid = 0;
  std::size_t num_classes = 6;
  std::vector<std::pair<double, double>> anchors;  // (w, h) in pixels
  double input_size = 0.0;                         // pixels
  std::vector<double> raw;

  std::size_t stride() const { return 5 + num_classes; }
  double& at(std::size_t row, std::size_t col, std::size_t anchor, std::size_t field);
  double at(std::size_t row, std::size_t col, std::size_t anchor, std::size_t field) const;
  static YoloHead zeros(std::size_t grid, std::vector<std::pair<double, double>> anchors,
                        double input_size, std::size_t num_classes = 6);
};

double sigmoid(double x);

// v5/v7-family decode: centre (2s(t) - 0.5 + cell) / grid, size
// (2s(t))^2 * anchor / input. Confidence is objectness x best class score.
// Throws std::invalid_argument on non-finite scores or thresholds outside [0, 1].
std::vector<Detection> decode_yolo(const YoloHead& head, double conf_threshold = kDefaultConfThreshold);

// Intersection over union; 0 for disjoint or zero-area boxes.
double iou(const BBox& a, const BBox& b);

// Greedy per-class suppression. Ranking: confidence desc, then class_id asc,
// then cx asc.
std::vector<Detection> nms(std::vector<Detection> dets, double iou_threshold = kDefaultNmsIou);
bool nms_ranks_before(const Detection& a, const Detection& b);

struct ClassAp {
  std::size_t class_id;
  double ap;
  std::size_t gt_count;
};

struct MapResult {
  double map = 0.0;
  std::vector<ClassAp> per_class;
};

// All-point interpolated AP per class present in the ground truth, averaged.
// Throws std::invalid_argument on an empty ground-truth set.
MapResult evaluate_map(const std::vector<ImageDetections>& preds,
                       const std::vector<GroundTruth>& gts, double iou_thresh = kMapIouThreshold);

// Largest-area detection not in `rejected`; ties go to the box centre closest
// to the image centre, then lower class_id, then lower id.
std::optional<Detection> select_target(const std::vector<Detection>& dets,
                                       const std::set<int>& rejected = {});

// JSON-lines fixtures: {image_id, class_id, confidence, cx, cy, w, h};
// ground truth omits confidence.
std::vector<ImageDetections> read_detections_jsonl(const std::filesystem::path& path);
std::vector<GroundTruth> read_ground_truth_jsonl(const std::filesystem::path& path);
void write_detections_jsonl(const std::vector<ImageDetections>& dets, const std::filesystem::path& path);
void write_ground_truth_jsonl(const std::vector<GroundTruth>& gts, const std::filesystem::path& path);

}  // namespace graspstack

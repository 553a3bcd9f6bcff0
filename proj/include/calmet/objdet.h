/*
 * Copyright 2026 The Calmet Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Object-detection calibration: box overlap, greedy matching and the
// detection metric family.

#ifndef CALMET_OBJDET_H_
#define CALMET_OBJDET_H_

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "calmet/core.h"

namespace calmet {

struct Box {
  double x = 0.0;  // top-left
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  int cls = 0;
  double score = 1.0;  // detections only
  std::size_t image = 0;
};

// Validates extents and score; throws NegativeExtent / OutOfRangeProbability.
void validate_box(const Box& b);

// Intersection over union; 0 when the union is empty.
double iou(const Box& a, const Box& b);

struct MatchedDetection {
  Box box;
  bool tp = false;
  double iou = 0.0;  // 0 for false positives
};

struct MatchedSet {
  std::vector<MatchedDetection> detections;
  std::vector<Box> unmatched_gt;
  std::vector<int> classes;  // sorted union of detection and ground-truth classes

  std::size_t tp_count() const;
  std::size_t fp_count() const;
  std::size_t fn_count() const { return unmatched_gt.size(); }
};

// Greedy matching per image in descending score order (stable on ties). Each
// detection takes the unmatched ground truth of highest IOU with
// IOU >= threshold and IOU > 0, restricted to its class when `same_class`.
MatchedSet match(const std::vector<Box>& dets, const std::vector<Box>& gts,
                 double iou_threshold = 0.5, bool same_class = true);

enum class DetBinnedKind { kAce, kDece, kLaece, kLaece0 };
enum class DetDim { kScore, kX, kY, kW, kH };

struct ImageSize {
  double width = 1.0;
  double height = 1.0;
};

struct DetBinnedOptions {
  DetBinnedKind kind = DetBinnedKind::kLaece0;
  std::size_t bins = 0;  // 0: 15 for ace/dece, 25 for laece
  std::vector<DetDim> dims{DetDim::kScore};
  std::size_t min_count = 8;  // dece cells below this are skipped
  double score_threshold = 0.0;  // laece
  std::map<std::size_t, ImageSize> image_sizes;  // missing images: 1 x 1
};

MetricResult det_binned(const MatchedSet& m, const DetBinnedOptions& opts);

MetricResult laace0(const MatchedSet& m);

struct Link {
  bool threshold = false;
  double t = 0.5;
  double operator()(double v) const { return threshold ? (v >= t ? 1.0 : 0.0) : v; }
};

// Leave-one-out beta-kernel regression of psi(IOU) on score. Without a
// bandwidth, h maximises the leave-one-out likelihood of the score density.
MetricResult l1cbod(const MatchedSet& m, Link psi = {}, std::optional<double> bandwidth = {});

enum class GlobalDetKind { kEgce, kQgc, kSgc };

MetricResult global_det(const MatchedSet& m, GlobalDetKind kind, bool normalized = false);

}  // namespace calmet

#endif  // CALMET_OBJDET_H_

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

#include <cmath>

#include "doctest.h"

#include "calmet/objdet.h"

using namespace calmet;
using doctest::Approx;

namespace {

Box det(double x, double score, int cls = 0, std::size_t image = 0) {
  return {x, 0.0, 1.0, 1.0, cls, score, image};
}
Box gt(double x, int cls = 0, std::size_t image = 0) { return {x, 0.0, 1.0, 1.0, cls, 1.0, image}; }

}  // namespace

TEST_SUITE("objdet") {
  TEST_CASE("intersection over union") {
    CHECK(iou(gt(0), gt(0)) == Approx(1.0));
    CHECK(iou(gt(0), gt(3)) == 0.0);
    CHECK(iou(gt(0), gt(0.5)) == Approx(1.0 / 3));
    const Box empty{0, 0, 0, 0};
    CHECK(iou(empty, empty) == 0.0);
    CHECK_THROWS_AS(validate_box({0, 0, -1, 1}), Error);
  }

  TEST_CASE("greedy matching") {
    auto one = match({det(0, 0.9)}, {gt(0)});
    CHECK(one.tp_count() == 1);
    CHECK(one.fp_count() == 0);
    CHECK(one.fn_count() == 0);
    auto two = match({det(0, 0.4), det(0.1, 0.8)}, {gt(0)});
    CHECK(two.tp_count() == 1);
    CHECK(two.fp_count() == 1);
    for (const auto& d : two.detections) CHECK(d.tp == (d.box.score == 0.8));
    // Unit squares shifted by 3/7 overlap with IOU 0.4.
    auto low = match({det(3.0 / 7, 0.9)}, {gt(0)});
    CHECK(low.detections[0].iou == 0.0);
    CHECK(low.fp_count() == 1);
    CHECK(low.fn_count() == 1);
    auto other = match({det(0, 0.9, 1)}, {gt(0, 0)});
    CHECK(other.fp_count() == 1);
    CHECK(match({det(0, 0.9, 1)}, {gt(0, 0)}, 0.5, false).tp_count() == 1);
  }

  TEST_CASE("binned detection errors") {
    // Half the detections at score 0.5 are correct.
    auto half = match({det(0, 0.5), det(5, 0.5), det(10, 0.5), det(15, 0.5)}, {gt(0), gt(10)});
    CHECK(det_binned(half, {DetBinnedKind::kAce}).value == Approx(0.0));
    DetBinnedOptions full;
    full.kind = DetBinnedKind::kDece;
    full.bins = 5;
    full.dims = {DetDim::kScore, DetDim::kX, DetDim::kY, DetDim::kW, DetDim::kH};
    const auto d = det_binned(half, full);
    CHECK(d.details.at("cells_total") == 3125);
    // Exact boxes: IOU factor 1.
    auto exact = match({det(0, 0.9), det(2, 0.9), det(20, 0.3), det(4, 0.6, 1)},
                       {gt(0), gt(2), gt(4, 1)});
    const double cls0 = (2.0 / 3) * 0.1 + (1.0 / 3) * 0.3;
    CHECK(det_binned(exact, {DetBinnedKind::kLaece0}).value == Approx((cls0 + 0.4) / 2));
    CHECK_THROWS_AS(det_binned(match({}, {gt(0)}), {DetBinnedKind::kAce}), Error);
  }

  TEST_CASE("localisation-aware absolute error") {
    // Shift by 1/3 gives IOU 0.5; shift by 0.25 gives IOU 0.6.
    CHECK(laace0(match({det(0.25, 0.6)}, {gt(0)})).value == Approx(0.0));
    CHECK(laace0(match({det(1.0 / 3, 0.9)}, {gt(0)})).value == Approx(0.4));
    CHECK(laace0(match({det(9, 0.35)}, {gt(0)})).value == Approx(0.35));
  }

  TEST_CASE("kernel detection error") {
    // Every score equals its IOU and the leave-one-out average reproduces it.
    std::vector<Box> dets, gts;
    const double overlap = 0.8 / 1.2;
    for (int i = 0; i < 4; ++i) {
      dets.push_back(det(10.0 * i + 0.2, overlap));
      gts.push_back(gt(10.0 * i));
    }
    CHECK(l1cbod(match(dets, gts)).value == Approx(0.0));
    // Two detections: each is predicted by the other alone.
    const auto two = match({det(0.1, 0.7), det(20.2, 0.4)}, {gt(0), gt(20)});
    const double i1 = 0.9 / 1.1, i2 = 0.8 / 1.2;
    CHECK(l1cbod(two).value == Approx((std::abs(i2 - 0.7) + std::abs(i1 - 0.4)) / 2));
    CHECK(l1cbod(two, Link{true, 0.5}).value == Approx((0.3 + 0.6) / 2));
    CHECK_THROWS_AS(l1cbod(match({det(0, 0.9)}, {gt(0)})), Error);
  }

  TEST_CASE("global detection errors") {
    CHECK(global_det(match({det(0, 1.0), det(5, 1.0)}, {gt(0), gt(5)}), GlobalDetKind::kQgc).value ==
          Approx(0.0));
    const auto m = match({det(0, 0.8), det(5, 0.3)}, {gt(0)});
    CHECK(global_det(m, GlobalDetKind::kQgc).value == Approx(0.13));
    CHECK(global_det(match({det(0, 0.8)}, {gt(0)}), GlobalDetKind::kSgc).value ==
          Approx(1 - 0.8 / std::sqrt(0.68)));
    CHECK(global_det(match({det(0, 0.8)}, {gt(0)}), GlobalDetKind::kSgc).value ==
          Approx(0.02986).epsilon(1e-4));
    CHECK(global_det(m, GlobalDetKind::kQgc, true).value == Approx(0.065));
  }
}

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

#include "calmet/binned.h"
#include "calmet/resample.h"
#include "helpers.h"

using namespace calmet;
using calmet::testing::calibrated;
using calmet::testing::V;
using doctest::Approx;

namespace {

MetricResult ece15(const BinaryView& v) { return binned_ce(v, BinningSpec::EqualWidth(15)); }

}  // namespace

TEST_SUITE("resample") {
  TEST_CASE("single round is deterministic") {
    const BinaryView v = calibrated(100, 1);
    const ResampleSpec spec{ResampleKind::kBootstrap, 1, 42};
    const auto a = resample_values(ece15, v, spec);
    const auto b = resample_values(ece15, v, spec);
    REQUIRE(a.size() == 1);
    CHECK(a == b);
    CHECK(resample_values(ece15, v, {ResampleKind::kBootstrap, 1, 43}) != a);
  }

  TEST_CASE("constant metric collapses the interval") {
    const BinaryView v = V({0, 1, 1, 0, 1}, {0.0, 1.0, 1.0, 0.0, 1.0});
    const auto r = resample_ci(ece15, v, {ResampleKind::kBootstrap, 200, 5});
    REQUIRE(r.ci.has_value());
    CHECK(r.ci->lo == 0.0);
    CHECK(r.ci->hi == 0.0);
    CHECK(r.value == 0.0);
  }

  TEST_CASE("point estimate unchanged") {
    const BinaryView v = calibrated(300, 2);
    const auto r = resample_ci(ece15, v, {ResampleKind::kBootstrap, 100, 9});
    CHECK(r.value == ece15(v).value);
    CHECK(r.ci->lo <= r.ci->hi);
  }

  TEST_CASE("percentile interval") {
    std::vector<double> x(100);
    for (int i = 0; i < 100; ++i) x[i] = 99 - i;
    const Interval ci = percentile_interval(x, 0.9);
    CHECK(ci.lo == 5.0);
    CHECK(ci.hi == 94.0);
  }

  TEST_CASE("consistency intervals cover calibrated data") {
    ResampleSpec spec{ResampleKind::kConsistency, 200, 0, 0.9};
    spec.map = CalibrationMap{[](double c) { return c; }};
    int covered = 0;
    const int reps = 40;
    for (int rep = 0; rep < reps; ++rep) {
      const BinaryView v = calibrated(300, 600 + rep);
      spec.seed = 1000 + rep;
      const auto r = resample_ci(ece15, v, spec);
      if (r.value >= r.ci->lo && r.value <= r.ci->hi) ++covered;
    }
    // 90% nominal, with room for Monte Carlo noise over 40 repetitions.
    CHECK(covered >= 32);
  }

  TEST_CASE("too many failed rounds") {
    int calls = 0;
    ViewMetric flaky = [&](const BinaryView& v) {
      if (++calls > 1 && calls % 3 == 0) throw Error(ErrorCode::kFitFailure, "flaky");
      return ece15(v);
    };
    CHECK_THROWS_AS(resample_ci(flaky, calibrated(50, 1), {ResampleKind::kBootstrap, 30, 1}), Error);
  }
}

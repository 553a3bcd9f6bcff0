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
#include "calmet/point.h"
#include "helpers.h"

using namespace calmet;
using calmet::testing::V;
using doctest::Approx;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_SUITE("point") {
  TEST_CASE("brier and rbs") {
    const Dataset one = make_dataset({1}, {{0.3, 0.7}});
    CHECK(brier(one).value == Approx(0.09));
    CHECK(brier(make_dataset({0, 1}, {{1.0, 0.0}, {0.0, 1.0}})).value == 0.0);
    const Dataset ds = make_dataset({0, 1, 2}, {{0.2, 0.5, 0.3}, {0.1, 0.6, 0.3}, {0.3, 0.3, 0.4}});
    CHECK(rbs(ds).value == Approx(std::sqrt(brier(ds).value)).epsilon(1e-12));
  }

  TEST_CASE("negative log-likelihood") {
    CHECK(nll(V({1}, {0.7})).value == Approx(-std::log(0.7)));
    CHECK(nll(V({1}, {1.0})).value == 0.0);
    CHECK(std::isinf(nll(V({1}, {0.0})).value));
  }

  TEST_CASE("focal loss") {
    const Dataset ds = make_dataset({1, 0, 1}, {{0.3, 0.7}, {0.6, 0.4}, {0.55, 0.45}});
    FocalOptions g0;
    g0.gamma = 0.0;
    CHECK(focal_loss(ds, g0).value == Approx(nll(top_label_view(ds)).value).epsilon(1e-12));
    CHECK(focal_loss(make_dataset({1}, {{0.0, 1.0}})).value == 0.0);
    CHECK(focal_loss(make_dataset({1}, {{0.3, 0.7}})).value == Approx(0.09 * -std::log(0.7)));
    CHECK(focal_loss(make_dataset({1}, {{0.3, 0.7}})).value == Approx(0.03210).epsilon(1e-4));
  }

  TEST_CASE("expected calibration difference") {
    CHECK(ecd(V({1, 0}, {0.5, 0.5})).value == 0.0);
    CHECK(ecd(V({1}, {0.7})).value == Approx(-0.3 * std::log(7.0 / 3.0)));
    CHECK(ecd(V({1}, {0.7})).value == Approx(-0.25419).epsilon(1e-4));
    const auto cal = calmet::testing::calibrated(20000, 5);
    CHECK(std::abs(ecd(cal, 1e-6).value) < 0.05);
  }

  TEST_CASE("global bias family") {
    const auto exact = V({1, 0, 1}, {1.0, 0.0, 1.0});
    CHECK(global_bias(exact, GlobalBiasKind::kGsb).value == 0.0);
    CHECK(global_bias(exact, GlobalBiasKind::kMdca).value == 0.0);
    CHECK(global_bias(exact, GlobalBiasKind::kEo).value == 1.0);
    CHECK(global_bias(V({1, 0}, {0.6, 0.4}), GlobalBiasKind::kEo).value == Approx(1.0));
    const Dataset ds = make_dataset({0, 1, 2, 1}, {{0.2, 0.5, 0.3}, {0.1, 0.6, 0.3}, {0.3, 0.3, 0.4}, {0.5, 0.4, 0.1}});
    double expected = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      const double e = binned_ce(ovr_view(ds, k), BinningSpec::EqualWidth(1)).value;
      expected += e * e / 3.0;
    }
    CHECK(global_bias(ds, GlobalBiasKind::kGsb).value == Approx(expected).epsilon(1e-12));
  }

  TEST_CASE("success rate") {
    CHECK(success_rate(make_dataset({0, 1}, {{0.9, 0.1}, {0.2, 0.8}})).value == 1.0);
    CHECK(success_rate(make_dataset({0}, {{0.5, 0.5}})).value == 0.5);
    CHECK(success_rate(make_dataset({1}, {{0.5, 0.5}})).value == 0.5);
    CHECK(success_rate(make_dataset({1, 0}, {{0.9, 0.1}, {0.2, 0.8}})).value == 0.0);
  }

  TEST_CASE("normalized squared errors") {
    CHECK(normalized_square(V({1}, {0.8}), NormalizedSquareKind::kNses).value == Approx(0.25));
    CHECK(normalized_square(V({1}, {0.8}), NormalizedSquareKind::kDss).value ==
          Approx(0.25 + 2.0 * std::log(0.4)));
    CHECK(normalized_square(V({1}, {0.8}), NormalizedSquareKind::kDss).value == Approx(-1.58258).epsilon(1e-5));
    const auto cal = calmet::testing::calibrated(20000, 6);
    CHECK(normalized_square(cal, NormalizedSquareKind::kNses, 1e-3).value == Approx(1.0).epsilon(0.1));
  }

  TEST_CASE("p-norm family") {
    CHECK(pnorm_error(V({1}, {0.7}), 1.0).value == Approx(0.3));
    const Dataset ds = make_dataset({1, 0, 1}, {{0.3, 0.7}, {0.6, 0.4}, {0.55, 0.45}});
    CHECK(pnorm_error(native_binary_view(ds), 2.0).value == Approx(rbs(ds).value).epsilon(1e-12));
    CHECK(pnorm_error(V({1, 0, 1}, {0.7, 0.4, 0.45}), kInf).value == Approx(0.55));
    const auto v = V({1, 0, 1}, {0.7, 0.4, 0.45});
    CHECK(hinge(v).value == Approx(pnorm_error(v, 1.0).value).epsilon(1e-12));
  }

  TEST_CASE("spiegelhalter z") {
    const auto r = spiegelhalter_z(V({0, 1}, {0.2, 0.8}));
    CHECK(r.value == Approx(-1.0 / std::sqrt(2.0)));
    CHECK(r.value == Approx(-0.70711).epsilon(1e-5));
    REQUIRE(r.p_value);
    CHECK(code_of([] { spiegelhalter_z(V({0, 1}, {0.5, 0.5})); }) == ErrorCode::kDegenerateDenominator);
    int inside = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      inside += std::abs(spiegelhalter_z(calmet::testing::calibrated(500, 100 + s)).value) <= 3.0;
    }
    CHECK(inside >= 99);
  }

  TEST_CASE("alpha scores") {
    const Dataset one = make_dataset({1}, {{0.3, 0.7}});
    CHECK(alpha_score(one, 2.0, AlphaKind::kPseudoSpherical).value == Approx(0.7 / std::sqrt(0.58)));
    CHECK(alpha_score(one, 2.0, AlphaKind::kPseudoSpherical).value == Approx(0.91915).epsilon(1e-5));
    CHECK(alpha_score(one, 2.0, AlphaKind::kPower).value == Approx(-0.82));
    CHECK(alpha_score(one, 2.0, AlphaKind::kPower, true).value == Approx(0.09));
  }

  TEST_CASE("soft F1") {
    CHECK(soft_f1(V({0, 0}, {0.0, 0.0})).value == 1.0);
    CHECK(soft_f1(V({0}, {1.0})).value == 0.0);
    CHECK(code_of([] { soft_f1(V({1}, {1.0})); }) == ErrorCode::kDegenerateDenominator);
  }

  TEST_CASE("ranked probability scores") {
    const Dataset bin = make_dataset({1, 0, 1}, {{0.3, 0.7}, {0.6, 0.4}, {0.55, 0.45}});
    CHECK(rps(bin).value == Approx(brier(bin).value).epsilon(1e-12));
    CHECK(rps(bin, RpsKind::kSarps).value == Approx(rps(bin).value).epsilon(1e-12));
    CHECK(rps(make_dataset({0}, {{0.5, 0.3, 0.2}})).value == Approx(0.145));
    const Dataset hot = make_dataset({2}, {{0.0, 0.0, 1.0}});
    CHECK(rps(hot).value == 0.0);
    CHECK(rps(hot, RpsKind::kSarps).value == 0.0);
  }
}

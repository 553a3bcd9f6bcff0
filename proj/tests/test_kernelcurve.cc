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

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "doctest.h"

#include "calmet/binned.h"
#include "calmet/kernelcurve.h"
#include "calmet/stats.h"
#include "helpers.h"

using namespace calmet;
using calmet::testing::calibrated;
using calmet::testing::tempered;
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

// Fractional outcomes equal to a uniform grid of confidences.
BinaryView identity_grid(std::size_t n, double lo = 0.0, double hi = 1.0) {
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = lo + (hi - lo) * (i + 0.5) / n;
  return V(c, c);
}

// Best weighted residual over every z on {-1, -0.9, ..., 1}^N that is
// 1-Lipschitz in c, both signs.
double smooth_ce_bruteforce(const BinaryView& v) {
  const std::size_t n = v.size();
  std::vector<int> z(n, -10);
  double best = 0.0;
  std::function<void(std::size_t)> walk = [&](std::size_t i) {
    if (i == n) {
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
          if (std::abs(z[a] - z[b]) / 10.0 > std::abs(v.c[a] - v.c[b]) + 1e-9) return;
        }
      }
      double s = 0.0;
      for (std::size_t a = 0; a < n; ++a) s += z[a] / 10.0 * (v.y[a] - v.c[a]);
      best = std::max(best, std::abs(s) / n);
      return;
    }
    for (int k = -10; k <= 10; ++k) {
      z[i] = k;
      walk(i + 1);
    }
  };
  walk(0);
  return best;
}

}  // namespace

TEST_SUITE("kernelcurve") {
  TEST_CASE("kernel calibration map") {
    const auto spec = KernelSpec::Fixed(KernelFamily::kGaussian, 0.08);
    const auto ones = kernel_calibration_map(V({1, 1, 1}, {0.1, 0.4, 0.9}), spec);
    for (double t : {0.0, 0.3, 0.77, 1.0}) CHECK(ones(t) == Approx(1.0));
    const auto sym = kernel_calibration_map(V({0, 1, 0, 1}, {0.2, 0.8, 0.4, 0.6}), spec);
    CHECK(sym(0.5) == Approx(0.5));
    const auto one = kernel_calibration_map(V({1}, {0.7}), spec);
    CHECK(one(0.0) == Approx(1.0));
    CHECK(one(0.7) == Approx(1.0));
    // Far from every point the Gaussian underflows; nearest outcome is used.
    const auto narrow = kernel_calibration_map(V({0, 1}, {0.0, 1.0}),
                                               KernelSpec::Fixed(KernelFamily::kEpanechnikov, 0.01));
    CHECK(narrow(0.2) == 0.0);
    CHECK(narrow(0.9) == 1.0);
  }

  TEST_CASE("kernel curve errors") {
    CHECK(msce(V({1}, {0.7})).value == Approx(0.09));
    CHECK(msce(V({1, 1}, {0.7, 0.7})).value == Approx(0.09));
    CHECK(msce(V({0, 1}, {0.5, 0.5})).value == Approx(0.0));
    CHECK(sece(V({1}, {0.7})).value == Approx(0.3));
  }

  TEST_CASE("smooth ece") {
    CHECK(smece(V({0, 1, 1}, {0.0, 1.0, 1.0})).value == Approx(0.0));
    const BinaryView v = tempered(300, 0.6, 21);
    const auto r = smece(v);
    CHECK(r.details.at("fixed_point_residual") < 1e-6);
    CHECK(std::abs(smece_at(v, r.value) - r.value) < 1e-6);
    for (double s : {0.01, 0.05, 0.2}) {
      CHECK(smece_at(v, s, 1024, true) == Approx(smece_at(v, s, 1024, false)).epsilon(1e-4));
    }
    // Constant residual over a dense uniform sample.
    BinaryView shift = identity_grid(2000, 0.0, 0.7);
    for (double& y : shift.y) y += 0.3;
    CHECK(smece(shift).value == Approx(0.3).epsilon(0.03));
  }

  TEST_CASE("kde estimators") {
    SynthSpec s;
    s.n = 10000;
    s.seed = 2;
    const Dataset big = generate(s).data;
    CHECK(std::abs(kde_ce(big, KdeKind::kBeta).value) < 0.005);
    CHECK(std::abs(kde_ce(big, KdeKind::kDirichlet).value) < 0.005);
    // Rankings agree on common inputs: fixed labels, predictions sharpened
    // along a ladder.
    const BinaryView base = calibrated(500, 100);
    std::vector<double> b, d;
    for (int i = 0; i < 20; ++i) {
      std::vector<int> y;
      std::vector<double> c;
      for (std::size_t j = 0; j < base.size(); ++j) {
        y.push_back(static_cast<int>(base.y[j]));
        c.push_back(sigmoid((1.0 + 0.1 * i) * logit(std::clamp(base.c[j], 1e-6, 1 - 1e-6))));
      }
      const Dataset ds = make_binary_dataset(y, c);
      b.push_back(kde_ce(ds, KdeKind::kBeta).value);
      d.push_back(kde_ce(ds, KdeKind::kDirichlet, 1.0).value);
    }
    auto ranks = [](const std::vector<double>& x) {
      std::vector<std::size_t> idx(x.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return x[i] < x[j]; });
      return idx;
    };
    CHECK(ranks(b) == ranks(d));
  }

  TEST_CASE("pairwise kernel errors") {
    CHECK(pairwise_kernel_ce(V({1}, {0.7}), PairwiseKind::kMmce).value == Approx(0.09));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      SynthSpec s;
      s.k = 3;
      s.n = 150;
      s.seed = seed;
      CHECK(pairwise_kernel_ce(generate(s).data, PairwiseKind::kSkceB).value >= 0.0);
    }
    std::vector<double> p;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      SynthSpec s;
      s.n = 400;
      s.seed = 500 + seed;
      p.push_back(*pairwise_kernel_ce(generate(s).data, PairwiseKind::kSkceUl).p_value);
    }
    CHECK(ks_uniform_distance(p) < 0.12);
  }

  TEST_CASE("smoothed density error") {
    const BinaryView id = identity_grid(2000);
    CHECK(skde(id).value < 0.01);
    const BinaryView v = tempered(500, 0.5, 3);
    CHECK(std::abs(skde(v, 1024).value - skde(v, 2048).value) < 1e-3);
  }

  TEST_CASE("reliability") {
    const std::size_t m = 10;
    CHECK(cluster_reliability(0.3 * m, m, 0.3) == Approx(1.0 + 1.0 / (m - 1)));
    std::vector<double> y, c;
    for (int i = 0; i < 40; ++i) {
      y.push_back(i % 2);
      c.push_back(i % 2);
    }
    const auto map = reliability_map(V(y, c));
    for (double r : map.cluster_reliability) CHECK(std::isfinite(r));
    for (double t : {0.0, 0.5, 1.0}) {
      CHECK(map.calibration(t) >= 0.001);
      CHECK(map.calibration(t) <= 0.999);
    }
    CHECK(code_of([] { reliability_map(V({0, 1}, {0.2, 0.3})); }) == ErrorCode::kTooFewPoints);
  }

  TEST_CASE("smooth calibration error") {
    CHECK(smooth_ce(V({0.5, 0.8}, {0.2, 0.5})).value == Approx(0.3));
    CHECK(smooth_ce(identity_grid(50)).value == Approx(0.0));
    Rng rng(77);
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t n = 1 + trial % 4;
      std::vector<double> y, c;
      for (std::size_t i = 0; i < n; ++i) {
        c.push_back(static_cast<double>(rng.index(11)) / 10.0);
        y.push_back(rng.bernoulli(0.5) ? 1.0 : 0.0);
      }
      const BinaryView v = V(y, c);
      CHECK(smooth_ce(v).value == Approx(smooth_ce_bruteforce(v)).epsilon(1e-6));
    }
  }

  TEST_CASE("logit-smoothed error") {
    const BinaryView v = calibrated(5000, 4);
    CHECK(lsece(v, 0.1, 0, 9).value == lsece(v, 0.1, 0, 9).value);
    const double a = lsece(v, 0.05, 0, 9).value;
    const double b = lsece(v, 0.2, 0, 9).value;
    CHECK(a < 0.04);
    CHECK(b < 0.04);
    CHECK(lsece(tempered(5000, 0.5, 4), 0.1, 0, 9).value > 2 * std::max(a, b));
  }

  TEST_CASE("loess summaries") {
    for (const auto& r : loess_metrics(identity_grid(200))) CHECK(r.value == Approx(0.0));
    const BinaryView v = tempered(400, 0.5, 8);
    const auto m = loess_metrics(v);
    REQUIRE(m.size() == 4);
    CHECK(m[3].value >= m[2].value);
    CHECK(m[2].value >= m[1].value);
    CHECK(m[3].value >= m[0].value);
    // Linear distortion is reproduced exactly by the quadratic fit.
    BinaryView lin = identity_grid(500);
    double expect = 0.0;
    for (std::size_t i = 0; i < lin.size(); ++i) {
      lin.y[i] = 0.5 * lin.c[i] + 0.25;
      expect += std::abs(0.25 - 0.5 * lin.c[i]) / lin.size();
    }
    CHECK(loess_metrics(lin)[0].value == Approx(expect).epsilon(1e-6));
    CHECK(code_of([] { loess_metrics(identity_grid(5)); }) == ErrorCode::kTooFewPoints);
  }

  TEST_CASE("estimated calibration index") {
    auto at = [](double tau) {
      SynthSpec s;
      s.n = 3000;
      s.seed = 6;
      s.map = TrueMapKind::kTemperature;
      s.tau = tau;
      return eci(generate(s).data).value;
    };
    const double calm = at(1.0), mild = at(0.7), strong = at(0.4);
    CHECK(calm < 0.002);
    CHECK(mild > calm);
    CHECK(strong > mild);
  }

  TEST_CASE("fit-on-the-test curves") {
    const auto flat = fott_fit(identity_grid(500));
    CHECK(flat.metric.value < 1e-3);
    FottOptions one{FottFamily::kPl3, 1};
    const auto fit = fott_fit(tempered(1000, 0.5, 2), one);
    // Each fold map is affine in logit space; the fold average nearly so.
    const double l1 = logit(fit.map(0.2)), l2 = logit(fit.map(0.5)), l3 = logit(fit.map(0.8));
    const double x1 = logit(0.2), x2 = logit(0.5), x3 = logit(0.8);
    CHECK((l2 - l1) / (x2 - x1) == Approx((l3 - l2) / (x3 - x2)).epsilon(1e-2));
    SynthSpec s;
    s.n = 5000;
    s.seed = 12;
    s.map = TrueMapKind::kParabola;
    const auto pick = fott_fit(native_binary_view(generate(s).data));
    CHECK(pick.segments >= 1);
    CHECK(pick.segments <= 5);
  }

  TEST_CASE("cox intercept and slope") {
    int covered = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto r = cox_intercept_slope(calibrated(500, 300 + seed));
      if (*r.intercept.p_value > 0.05 && *r.slope.p_value > 0.05) ++covered;
    }
    CHECK(covered >= 40);
    const auto t = cox_intercept_slope(tempered(20000, 0.5, 1));
    CHECK(t.slope.value == Approx(2.0).epsilon(0.05));
    CHECK(code_of([] { cox_intercept_slope(V({0, 1}, {0.0, 0.5})); }) ==
          ErrorCode::kBoundaryConfidence);
    CHECK(code_of([] { cox_intercept_slope(V({0, 0, 1, 1}, {0.1, 0.2, 0.7, 0.8})); }) ==
          ErrorCode::kSeparationFailure);
  }

  TEST_CASE("beta calibration test") {
    const auto flat = sbct(identity_grid(400, 0.01, 0.99));
    CHECK(flat.value == Approx(0.0).epsilon(1e-8));
    CHECK(*flat.p_value == Approx(1.0));
    const BinaryView v = tempered(400, 0.6, 4);
    CHECK(sbct_fit(v, 1001).metric.value ==
          Approx(sbct_fit(v, 20001).metric.value).epsilon(1e-6));
    int reject = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      if (*sbct(calibrated(1000, 900 + seed)).p_value < 0.05) ++reject;
    }
    CHECK(reject <= 12);
  }

  TEST_CASE("parabola test") {
    const auto flat = pws(identity_grid(50));
    CHECK(flat.value == Approx(0.0));
    CHECK(*flat.p_value == Approx(1.0));
    CHECK(code_of([] { pws(V(std::vector<double>(20, 1.0), std::vector<double>(20, 0.4))); }) ==
          ErrorCode::kSingularDesign);
    std::vector<double> p;
    for (std::uint64_t seed = 0; seed < 200; ++seed) p.push_back(*pws(calibrated(500, seed)).p_value);
    CHECK(ks_uniform_distance(p) < 0.12);
  }
}

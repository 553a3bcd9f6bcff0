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
#include "calmet/synth.h"

using namespace calmet;
using doctest::Approx;

TEST_SUITE("synth") {
  TEST_CASE("identity map is calibrated") {
    SynthSpec s;
    s.n = 100000;
    s.seed = 1;
    const BinaryView v = native_binary_view(generate(s).data);
    CHECK(binned_ce(v, BinningSpec::EqualMass(15)).value < 0.01);
  }

  TEST_CASE("unit temperature matches identity") {
    SynthSpec a;
    a.seed = 8;
    SynthSpec b = a;
    b.map = TrueMapKind::kTemperature;
    b.tau = 1.0;
    const Dataset da = generate(a).data, db = generate(b).data;
    CHECK(da.labels() == db.labels());
    CHECK(da.flat_probs() == db.flat_probs());
  }

  TEST_CASE("constant map gives fair coins") {
    SynthSpec s;
    s.map = TrueMapKind::kParabola;
    s.theta = {0.5, 0.0, 0.0};
    s.n = 40000;
    s.seed = 2;
    const BinaryView v = native_binary_view(generate(s).data);
    double lo = 0, nlo = 0, hi = 0, nhi = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      (v.c[i] < 0.5 ? lo : hi) += v.y[i];
      (v.c[i] < 0.5 ? nlo : nhi) += 1;
    }
    CHECK(lo / nlo == Approx(0.5).epsilon(0.03));
    CHECK(hi / nhi == Approx(0.5).epsilon(0.03));
  }

  TEST_CASE("deterministic given seed") {
    SynthSpec s;
    s.k = 3;
    s.seed = 77;
    CHECK(generate(s).data.flat_probs() == generate(s).data.flat_probs());
  }

  TEST_CASE("true calibration error") {
    CHECK(true_ce(SynthSpec{}) == 0.0);
    SynthSpec sq;
    sq.map = TrueMapKind::kParabola;
    sq.theta = {0.0, 0.0, 1.0};
    CHECK(true_ce(sq) == Approx(1.0 / 6).epsilon(1e-9));
    CHECK(std::abs(true_ce(sq, 1.0, 10000) - true_ce(sq, 1.0, 100000)) < 1e-6);
    SynthSpec t;
    t.map = TrueMapKind::kTemperature;
    t.tau = 0.5;
    t.dist = ConfidenceDist::kBeta;
    t.dist_a = 2;
    t.dist_b = 5;
    CHECK(std::abs(true_ce(t, 2.0, 10000) - true_ce(t, 2.0, 100000)) < 1e-6);
  }
}

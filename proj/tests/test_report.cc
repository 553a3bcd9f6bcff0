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

#include "calmet/report.h"
#include "calmet/synth.h"
#include "helpers.h"

using namespace calmet;
using calmet::testing::calibrated;
using calmet::testing::V;
using doctest::Approx;

TEST_SUITE("report") {
  TEST_CASE("reliability rows") {
    std::vector<double> y(10, 0.0);
    for (int i = 0; i < 7; ++i) y[i] = 1.0;
    const auto t = reliability_table(V(y, std::vector<double>(10, 0.7)), BinningSpec::EqualWidth(10));
    REQUIRE(t.rows.size() == 10);
    int occupied = 0;
    for (const auto& row : t.rows) {
      if (!row.has_marker) {
        CHECK(row.count == 0);
        continue;
      }
      ++occupied;
      CHECK(row.mean_conf == Approx(0.7));
      CHECK(row.mean_outcome == Approx(0.7));
    }
    CHECK(occupied == 1);
  }

  TEST_CASE("tilted roof and standard error") {
    const BinaryView v = V({1, 1, 0, 0}, {0.1, 0.2, 0.6, 0.9});
    const auto t = reliability_table(v, BinningSpec::EqualWidth(2), DiagramStyle::kTiltedRoof);
    for (const auto& row : t.rows) {
      CHECK(row.roof_hi - row.roof_lo == Approx(row.hi - row.lo));
      CHECK(row.roof_lo == Approx(row.mean_outcome - (row.mean_conf - row.lo)));
      CHECK(row.std_error == 0.0);
    }
    // Bin centred on its mean: the roof is mean outcome +- half-width.
    const auto c = reliability_table(V({1, 0}, {0.2, 0.3}), BinningSpec::EqualWidth(2),
                                     DiagramStyle::kTiltedRoof);
    CHECK(c.rows[0].roof_lo == Approx(0.5 - 0.25));
    CHECK(c.rows[0].roof_hi == Approx(0.5 + 0.25));
  }

  TEST_CASE("simplex cells") {
    CHECK(simplex_table(make_dataset({0, 0}, {{0.9, 0.05, 0.05}, {0.92, 0.04, 0.04}})).rows.size() == 1);
    CHECK_THROWS_AS(simplex_table(make_binary_dataset({0, 1}, {0.2, 0.8})), Error);
    // Every cell id is distinct over a fine sweep of the simplex.
    std::vector<int> seen(25, 0);
    for (int a = 0; a <= 50; ++a) {
      for (int b = 0; a + b <= 50; ++b) seen[simplex_cell(a / 50.0, b / 50.0, 5)] = 1;
    }
    for (int s : seen) CHECK(s == 1);
  }

  TEST_CASE("simplex arrows") {
    auto arrow = [](std::size_t n, double bias) {
      SynthSpec s;
      s.k = 3;
      s.n = n;
      s.seed = 4;
      const Dataset base = generate(s).data;
      std::vector<std::vector<double>> p;
      std::vector<int> labels = base.labels();
      for (std::size_t i = 0; i < base.n(); ++i) {
        std::vector<double> r(base.row(i).begin(), base.row(i).end());
        // Shift mass away from class 1 so outcomes point towards it.
        const double move = bias * r[1];
        r[1] -= move;
        r[0] += move / 2;
        r[2] += move / 2;
        p.push_back(r);
      }
      return simplex_table(make_dataset(labels, p));
    };
    auto mean_length = [](const SimplexTable& t) {
      double total = 0.0;
      std::size_t n = 0;
      for (const auto& row : t.rows) {
        double sq = 0.0;
        for (int j = 0; j < 3; ++j) sq += std::pow(row.tail[j] - row.head[j], 2);
        total += row.count * std::sqrt(sq);
        n += row.count;
      }
      return total / n;
    };
    CHECK(mean_length(arrow(50000, 0.0)) < mean_length(arrow(2000, 0.0)));
    const auto biased = arrow(20000, 0.3);
    int up = 0, down = 0;
    for (const auto& row : biased.rows) {
      if (row.count < 20) continue;
      (row.tail[1] > row.head[1] ? up : down) += 1;
    }
    CHECK(up > 3 * down);
  }

  TEST_CASE("brier curve") {
    const auto sep = brier_curve(V({0, 0, 1, 1}, {0.0, 0.0, 1.0, 1.0}), 100);
    for (std::size_t g = 1; g + 1 < sep.brier.size(); ++g) CHECK(sep.brier[g] == Approx(0.0));
    const BinaryView v = calibrated(500, 3);
    const std::size_t grid = 1000;
    const auto bc = brier_curve(v, grid);
    CHECK(bc.brier.front() == Approx(0.0));
    CHECK(bc.brier.back() == Approx(0.0));
    double bs = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) bs += std::pow(v.y[i] - v.c[i], 2) / v.size();
    CHECK(std::abs(bc.area - bs) <= 2.0 / grid);
    for (std::size_t g = 0; g < bc.cost.size(); ++g) CHECK(bc.cost_curve[g] <= bc.brier[g] + 1e-12);
    CHECK_THROWS_AS(brier_curve(V({1, 1}, {0.2, 0.4})), Error);
  }
}

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

#include "doctest.h"

#include "calmet/binning.h"
#include "calmet/core.h"
#include "helpers.h"

using namespace calmet;
using calmet::testing::V;

TEST_SUITE("core") {
  TEST_CASE("make_dataset validates shape and stochasticity") {
    const Dataset ds = make_dataset({1}, {{0.3, 0.7}});
    CHECK(ds.n() == 1);
    CHECK(ds.k() == 2);
    try {
      make_dataset({0}, {{0.5, 0.6}});
      FAIL("expected NonStochasticRow");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNonStochasticRow);
    }
    try {
      make_dataset({2}, {{0.5, 0.5}});
      FAIL("expected LabelOutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kLabelOutOfRange);
    }
  }

  TEST_CASE("top-label view") {
    auto v = top_label_view(make_dataset({1}, {{0.3, 0.7}}));
    CHECK(v.y[0] == 1.0);
    CHECK(v.c[0] == doctest::Approx(0.7));
    v = top_label_view(make_dataset({0}, {{0.5, 0.5}}));
    CHECK(v.y[0] == 1.0);
    CHECK(v.c[0] == 0.5);
    v = top_label_view(make_dataset({1}, {{0.8, 0.2}}));
    CHECK(v.y[0] == 0.0);
    CHECK(v.c[0] == doctest::Approx(0.8));
  }

  TEST_CASE("one-vs-rest view") {
    const Dataset bin = make_dataset({1, 0}, {{0.3, 0.7}, {0.6, 0.4}});
    const auto a = ovr_view(bin, 1);
    const auto b = native_binary_view(bin);
    CHECK(a.y == b.y);
    CHECK(a.c == b.c);
    const Dataset ds = make_dataset({0}, {{0.5, 0.3, 0.2}});
    CHECK(ovr_view(ds, 0).y[0] == 1.0);
    CHECK(ovr_view(ds, 0).c[0] == doctest::Approx(0.5));
    CHECK(ovr_view(ds, 2).y[0] == 0.0);
    CHECK(ovr_view(ds, 2).c[0] == doctest::Approx(0.2));
  }

  TEST_CASE("code matrices") {
    const auto ovr = code_matrix(CodeKind::kOneVsRest, 4);
    CHECK(ovr.rows == 4);
    CHECK(ovr.cols == 4);
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 4; ++c) CHECK(ovr.at(r, c) == (r == c ? 1 : -1));
    }
    const auto pair = code_matrix(CodeKind::kPairwise, 4);
    const std::vector<int> expected = {1, 1, 1, 0, 0, 0,  -1, 0, 0, 1, 1, 0,
                                       0, -1, 0, -1, 0, 1, 0, 0, -1, 0, -1, -1};
    CHECK(pair.cols == 6);
    CHECK(pair.entries == expected);
    const auto two = code_matrix(CodeKind::kPairwise, 2);
    CHECK(two.cols == 1);
    CHECK(two.at(0, 0) == 1);
    CHECK(two.at(1, 0) == -1);
  }

  TEST_CASE("accuracy") {
    CHECK(accuracy(make_dataset({0, 1}, {{0.9, 0.1}, {0.2, 0.8}})) == 1.0);
    CHECK(accuracy(make_dataset({1, 0}, {{0.9, 0.1}, {0.2, 0.8}})) == 0.0);
    CHECK(accuracy(make_dataset({0, 1, 1, 1}, {{0.9, 0.1}, {0.2, 0.8}, {0.3, 0.7}, {0.6, 0.4}})) == 0.75);
  }
}

TEST_SUITE("binning") {
  TEST_CASE("equal width") {
    const auto view = V({0, 1, 1, 1}, {0.2, 0.3, 0.8, 0.9});
    const auto bins = bin_equal_width(view, 2);
    REQUIRE(bins.size() == 2);
    CHECK(bins[0].members == std::vector<std::size_t>{0, 1});
    CHECK(bins[1].members == std::vector<std::size_t>{2, 3});
    CHECK(bin_equal_width(view, 1)[0].count == 4);
    const auto top = bin_equal_width(V({1}, {1.0}), 10);
    CHECK(top[9].count == 1);
  }

  TEST_CASE("equal mass") {
    auto bins = bin_equal_mass(V({0, 0, 1, 1}, {0.1, 0.2, 0.8, 0.9}), 2);
    CHECK(bins[0].members == std::vector<std::size_t>{0, 1});
    CHECK(bins[1].members == std::vector<std::size_t>{2, 3});
    bins = bin_equal_mass(V({0, 0, 1, 1, 1}, {0.1, 0.2, 0.3, 0.8, 0.9}), 2);
    CHECK(bins[0].count == 3);
    CHECK(bins[1].count == 2);
    bins = bin_equal_mass(V({0, 1, 0, 1}, {0.4, 0.4, 0.4, 0.4}), 2);
    CHECK(bins[0].members == std::vector<std::size_t>{0, 1});
    CHECK(bins[1].members == std::vector<std::size_t>{2, 3});
    try {
      bin_equal_mass(V({0}, {0.4}), 2);
      FAIL("expected BinsExceedPoints");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kBinsExceedPoints);
    }
  }

  TEST_CASE("equal area") {
    std::vector<double> c, y;
    for (int i = 0; i < 100; ++i) {
      c.push_back((i + 0.5) / 100.0);
      y.push_back(i % 2);
    }
    const auto view = V(y, c);
    const auto area = bin_equal_area(view, 5);
    const auto width = bin_equal_width(view, 5);
    REQUIRE(area.size() == width.size());
    for (std::size_t b = 0; b < area.size(); ++b) {
      CHECK(std::abs(static_cast<double>(area[b].count) - static_cast<double>(width[b].count)) <= 1.0);
    }
    CHECK(bin_equal_area(view, 1)[0].count == 100);
    std::size_t occupied = 0;
    for (const auto& b : bin_equal_area(V({0, 1, 1}, {0.6, 0.6, 0.6}), 3)) occupied += b.count > 0;
    CHECK(occupied == 1);
  }

  TEST_CASE("sweep") {
    CHECK(bin_sweep(V({1, 0}, {0.3, 0.6})).size() == 1);
    std::vector<double> c, y;
    for (int i = 0; i < 6; ++i) {
      c.push_back(0.1 + 0.1 * i);
      y.push_back(0.5);
    }
    CHECK(bin_sweep(V(y, c)).size() == 6);
  }

  TEST_CASE("max-variance mean split") {
    std::vector<double> same(20, 0.4);
    CHECK(bin_mvms(same, 1, 5).size() == 1);
    std::vector<double> pts;
    for (int i = 0; i < 1000; ++i) pts.push_back(0.1 + 1e-4 * (i % 7));
    for (int i = 0; i < 1000; ++i) pts.push_back(0.9 - 1e-4 * (i % 5));
    CHECK(bin_mvms(pts, 1, 1000).size() == 2);
    CHECK(bin_mvms(pts, 1, 2000).size() == 1);
  }

  TEST_CASE("proximity grid") {
    FeatureMatrix f;
    f.rows = 6;
    f.cols = 1;
    f.data = {0.0, 0.0, 1.0, 2.0, 3.0, 3.0};
    const auto prox = proximity_scores(f);
    CHECK(prox.size() == 6);
    FeatureMatrix dup;
    dup.rows = 2;
    dup.cols = 2;
    dup.data = {0.3, 0.7, 0.3, 0.7};
    CHECK(proximity_scores(dup) == std::vector<double>{0.0, 0.0});
    const auto view = V({0, 1, 0, 1, 1, 0}, {0.1, 0.2, 0.4, 0.5, 0.7, 0.9});
    const auto grid = bin_proximity_grid(view, f, 3, 1);
    const auto em = bin_equal_mass(view, 3);
    REQUIRE(grid.size() == em.size());
    for (std::size_t b = 0; b < em.size(); ++b) CHECK(grid[b].members == em[b].members);
    BinningSpec spec;
    CHECK(spec.bins == 15);
    CHECK(spec.proximity_bins == 10);
  }
}

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

#include "calmet/cumulative.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "calmet/binning.h"
#include "calmet/stats.h"

namespace calmet {

CumulativeTrace cdp(const BinaryView& view) {
  if (view.size() == 0) throw Error(ErrorCode::kTooFewPoints, "empty input");
  CumulativeTrace t;
  t.order = confidence_order(view);
  const double n = static_cast<double>(view.size());
  t.cdp.assign(view.size() + 1, 0.0);
  double var = 0.0;
  for (std::size_t j = 0; j < t.order.size(); ++j) {
    const std::size_t i = t.order[j];
    t.cdp[j + 1] = t.cdp[j] + (view.y[i] - view.c[i]) / n;
    var += view.c[i] * (1.0 - view.c[i]);
  }
  t.sigma_n = std::sqrt(var) / n;
  return t;
}

MetricResult ecce(const BinaryView& view, EcceKind kind) {
  const CumulativeTrace t = cdp(view);
  double value = 0.0;
  if (kind == EcceKind::kMad) {
    for (double v : t.cdp) value = std::max(value, std::abs(v));
  } else {
    const auto [lo, hi] = std::minmax_element(t.cdp.begin(), t.cdp.end());
    value = *hi - *lo;
  }
  auto r = make_result(kind == EcceKind::kMad ? "ecce_mad" : "ecce_r", value, {0.0, 1.0});
  r.details["sigma_n"] = t.sigma_n;
  if (t.sigma_n > 0.0) {
    const double z = value / t.sigma_n;
    r.p_value = kind == EcceKind::kMad ? brownian_max_abs_sf(z) : brownian_range_sf(z);
  } else {
    r.details["degenerate_null"] = 1.0;
  }
  return r;
}

MetricResult ks_top_r(const Dataset& ds, std::size_t r, TopREvent event) {
  if (r == 0 || r >= ds.k()) throw Error(ErrorCode::kInvalidArgument, "r must be in [1, K)");
  std::vector<double> y(ds.n()), c(ds.n());
  std::vector<std::size_t> rank(ds.k());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto row = ds.row(i);
    std::iota(rank.begin(), rank.end(), 0);
    // Descending probability, lowest index first on ties.
    std::stable_sort(rank.begin(), rank.end(),
                     [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
    const auto lbl = static_cast<std::size_t>(ds.label(i));
    if (event == TopREvent::kTopSet) {
      double s = 0.0;
      bool hit = false;
      for (std::size_t q = 0; q < r; ++q) {
        s += row[rank[q]];
        hit = hit || rank[q] == lbl;
      }
      y[i] = hit ? 1.0 : 0.0;
      c[i] = std::min(1.0, s);
    } else {
      y[i] = rank[r - 1] == lbl ? 1.0 : 0.0;
      c[i] = row[rank[r - 1]];
    }
  }
  auto res = ecce(make_view(std::move(y), std::move(c)), EcceKind::kMad);
  res.name = "ks_top_r";
  res.details["r"] = static_cast<double>(r);
  return res;
}

}  // namespace calmet

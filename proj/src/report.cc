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

#include "calmet/report.h"

#include <algorithm>
#include <cmath>
#include <map>

namespace calmet {

const char* DiagramStyleName(DiagramStyle s) {
  switch (s) {
    case DiagramStyle::kLine: return "line";
    case DiagramStyle::kBar: return "bar";
    case DiagramStyle::kTiltedRoof: return "tilted-roof";
  }
  return "unknown";
}

DiagramTable reliability_table(const BinaryView& view, const BinningSpec& binning,
                               DiagramStyle style) {
  const BinSummary bins = apply_binning(view, binning);
  DiagramTable t;
  t.scheme = BinSchemeName(binning.scheme);
  t.style = style;
  t.bins = bins.size();
  t.n = view.size();
  for (std::size_t b = 0; b < bins.size(); ++b) {
    const Bin& bin = bins[b];
    DiagramRow row;
    row.bin = b;
    row.count = bin.count;
    row.lo = bin.lo;
    row.hi = bin.hi;
    if (bin.count > 0) {
      row.has_marker = true;
      row.mean_conf = bin.mean_conf;
      row.mean_outcome = bin.mean_outcome;
      const double yb = bin.mean_outcome;
      row.std_error = std::sqrt(std::max(0.0, yb * (1.0 - yb)) / static_cast<double>(bin.count));
      if (style == DiagramStyle::kTiltedRoof) {
        row.roof_lo = yb + (bin.lo - bin.mean_conf);
        row.roof_hi = yb + (bin.hi - bin.mean_conf);
      }
    }
    t.rows.push_back(row);
  }
  return t;
}

std::size_t simplex_cell(double p0, double p1, std::size_t depth) {
  const double d = static_cast<double>(depth);
  const double a = std::clamp(p0, 0.0, 1.0) * d;
  const double b = std::clamp(p1, 0.0, 1.0) * d;
  const std::size_t i = std::min(depth - 1, static_cast<std::size_t>(std::floor(a)));
  const std::size_t j = std::min(depth - 1 - i, static_cast<std::size_t>(std::floor(b)));
  const double fa = a - static_cast<double>(i);
  const double fb = b - static_cast<double>(j);
  const std::size_t down = (fa + fb > 1.0 && i + j + 2 <= depth) ? 1 : 0;
  // Row i holds d - i upward and d - i - 1 downward triangles, interleaved.
  return i * (2 * depth - i) + 2 * j + down;
}

SimplexTable simplex_table(const Dataset& ds, std::size_t depth) {
  if (ds.k() != 3) throw Error(ErrorCode::kWrongClassCount, "simplex table needs K = 3");
  if (depth < 1) throw Error(ErrorCode::kInvalidArgument, "depth must be >= 1");
  std::map<std::size_t, SimplexRow> cells;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const std::size_t id = simplex_cell(ds.prob(i, 0), ds.prob(i, 1), depth);
    SimplexRow& row = cells[id];
    if (row.count == 0) {
      row.cell = id;
      row.tail.assign(3, 0.0);
      row.head.assign(3, 0.0);
    }
    ++row.count;
    row.tail[static_cast<std::size_t>(ds.label(i))] += 1.0;
    for (std::size_t k = 0; k < 3; ++k) row.head[k] += ds.prob(i, k);
  }
  SimplexTable t;
  t.depth = depth;
  for (auto& [id, row] : cells) {
    for (std::size_t k = 0; k < 3; ++k) {
      row.tail[k] /= static_cast<double>(row.count);
      row.head[k] /= static_cast<double>(row.count);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

BrierCurve brier_curve(const BinaryView& view, std::size_t grid) {
  if (grid < 1) throw Error(ErrorCode::kInvalidArgument, "grid must be >= 1");
  std::vector<double> c0, c1;
  for (std::size_t i = 0; i < view.size(); ++i) (view.y[i] > 0.5 ? c1 : c0).push_back(view.c[i]);
  if (c0.empty() || c1.empty()) throw Error(ErrorCode::kSingleClass, "Brier curve needs both classes");
  std::sort(c0.begin(), c0.end());
  std::sort(c1.begin(), c1.end());
  const double n = static_cast<double>(view.size());
  const double pi0 = static_cast<double>(c0.size()) / n, pi1 = 1.0 - pi0;
  auto cdf = [](const std::vector<double>& s, double t) {
    return static_cast<double>(std::upper_bound(s.begin(), s.end(), t) - s.begin()) /
           static_cast<double>(s.size());
  };
  // Each candidate threshold contributes a cost line; F = 0 models a
  // threshold below every confidence.
  std::vector<std::pair<double, double>> lines{{0.0, 0.0}};
  std::vector<double> all = view.c;
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  for (double t : all) lines.emplace_back(cdf(c0, t), cdf(c1, t));
  BrierCurve out;
  for (std::size_t g = 0; g <= grid; ++g) {
    const double c = static_cast<double>(g) / static_cast<double>(grid);
    const double bc = 2.0 * c * pi0 * (1.0 - cdf(c0, c)) + 2.0 * (1.0 - c) * pi1 * cdf(c1, c);
    double env = kInf;
    for (const auto& [f0, f1] : lines) {
      env = std::min(env, 2.0 * c * pi0 * (1.0 - f0) + 2.0 * (1.0 - c) * pi1 * f1);
    }
    out.cost.push_back(c);
    out.brier.push_back(bc);
    out.cost_curve.push_back(std::min(env, bc));
  }
  const double step = 1.0 / static_cast<double>(grid);
  for (std::size_t g = 0; g < grid; ++g) out.area += 0.5 * step * (out.brier[g] + out.brier[g + 1]);
  return out;
}

}  // namespace calmet

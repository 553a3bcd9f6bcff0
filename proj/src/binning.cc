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

#include "calmet/binning.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace calmet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Contiguous groups of sorted positions, earlier groups taking the remainder.
std::vector<std::size_t> equal_mass_sizes(std::size_t n, std::size_t bins) {
  std::vector<std::size_t> sizes(bins, n / bins);
  for (std::size_t b = 0; b < n % bins; ++b) ++sizes[b];
  return sizes;
}

BinSummary groups_from_sorted(const BinaryView& view,
                              const std::vector<std::size_t>& order,
                              const std::vector<std::size_t>& sizes) {
  BinSummary out;
  out.reserve(sizes.size());
  std::size_t start = 0;
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    std::vector<std::size_t> members(order.begin() + static_cast<long>(start),
                                     order.begin() + static_cast<long>(start + sizes[b]));
    const std::size_t end = start + sizes[b];
    double lo = 0.0, hi = 1.0;
    if (b > 0 && start > 0 && start < order.size()) {
      lo = 0.5 * (view.c[order[start - 1]] + view.c[order[start]]);
    }
    if (b + 1 < sizes.size() && end > 0 && end < order.size()) {
      hi = 0.5 * (view.c[order[end - 1]] + view.c[order[end]]);
    }
    out.push_back(summarize_bin(view, std::move(members), view.size(), lo, hi));
    start = end;
  }
  return out;
}

}  // namespace

const char* BinSchemeName(BinScheme scheme) {
  switch (scheme) {
    case BinScheme::kEqualWidth: return "equal-width";
    case BinScheme::kEqualMass: return "equal-mass";
    case BinScheme::kEqualArea: return "equal-area";
    case BinScheme::kSweep: return "sweep";
    case BinScheme::kSliding: return "sliding";
    case BinScheme::kKnn: return "knn";
    case BinScheme::kMvms: return "mvms";
    case BinScheme::kProximityGrid: return "proximity-grid";
  }
  return "unknown";
}

BinScheme ParseBinScheme(const std::string& name) {
  if (name == "equal-width" || name == "ew") return BinScheme::kEqualWidth;
  if (name == "equal-mass" || name == "em") return BinScheme::kEqualMass;
  if (name == "equal-area" || name == "ea") return BinScheme::kEqualArea;
  if (name == "sweep") return BinScheme::kSweep;
  if (name == "sliding") return BinScheme::kSliding;
  if (name == "knn") return BinScheme::kKnn;
  if (name == "mvms") return BinScheme::kMvms;
  if (name == "proximity-grid") return BinScheme::kProximityGrid;
  throw Error(ErrorCode::kConfigError, "unknown binning scheme '" + name + "'");
}

Bin summarize_bin(const BinaryView& view, std::vector<std::size_t> members,
                  std::size_t total, double lo, double hi) {
  Bin bin;
  bin.lo = lo;
  bin.hi = hi;
  bin.count = members.size();
  bin.mass = total == 0 ? 0.0 : static_cast<double>(bin.count) / static_cast<double>(total);
  if (bin.count == 0) {
    bin.mean_conf = kNaN;
    bin.mean_outcome = kNaN;
  } else {
    double sc = 0.0, sy = 0.0;
    for (std::size_t i : members) {
      sc += view.c[i];
      sy += view.y[i];
    }
    bin.mean_conf = sc / static_cast<double>(bin.count);
    bin.mean_outcome = sy / static_cast<double>(bin.count);
  }
  bin.members = std::move(members);
  return bin;
}

std::vector<std::size_t> confidence_order(const BinaryView& view) {
  std::vector<std::size_t> order(view.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return view.c[a] < view.c[b]; });
  return order;
}

BinSummary bin_equal_width(const BinaryView& view, std::size_t bins) {
  if (bins < 1) throw Error(ErrorCode::kInvalidArgument, "bin count must be >= 1");
  std::vector<std::vector<std::size_t>> members(bins);
  const double b = static_cast<double>(bins);
  for (std::size_t i = 0; i < view.size(); ++i) {
    auto idx = static_cast<std::size_t>(std::floor(view.c[i] * b));
    members[std::min(idx, bins - 1)].push_back(i);
  }
  BinSummary out;
  out.reserve(bins);
  for (std::size_t j = 0; j < bins; ++j) {
    out.push_back(summarize_bin(view, std::move(members[j]), view.size(),
                                static_cast<double>(j) / b,
                                static_cast<double>(j + 1) / b));
  }
  return out;
}

BinSummary bin_equal_mass(const BinaryView& view, std::size_t bins) {
  if (bins < 1) throw Error(ErrorCode::kInvalidArgument, "bin count must be >= 1");
  if (bins > view.size()) {
    throw Error(ErrorCode::kBinsExceedPoints, "more equal-mass bins than points");
  }
  return groups_from_sorted(view, confidence_order(view),
                            equal_mass_sizes(view.size(), bins));
}

namespace {

// Greedy left-to-right cut closing a bin once width * mass reaches `target`.
// Identical confidences never straddle a cut.
std::vector<std::size_t> greedy_area_sizes(const std::vector<double>& sorted,
                                           double target) {
  const std::size_t n = sorted.size();
  std::vector<std::size_t> sizes;
  double start = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < n; ++j) {
    ++count;
    const bool tie_follows = j + 1 < n && sorted[j + 1] == sorted[j];
    const double area = (sorted[j] - start) * static_cast<double>(count) /
                        static_cast<double>(n);
    if (!tie_follows && area >= target && j + 1 < n) {
      sizes.push_back(count);
      start = sorted[j];
      count = 0;
    }
  }
  if (count > 0) sizes.push_back(count);
  return sizes;
}

}  // namespace

BinSummary bin_equal_area(const BinaryView& view, std::size_t bins) {
  if (bins < 1) throw Error(ErrorCode::kInvalidArgument, "bin count must be >= 1");
  const auto order = confidence_order(view);
  if (bins == 1 || view.size() <= 1) {
    return groups_from_sorted(view, order, {view.size()});
  }
  std::vector<double> sorted(order.size());
  for (std::size_t j = 0; j < order.size(); ++j) sorted[j] = view.c[order[j]];
  // Larger targets give fewer bins; bisect for the smallest target that
  // still yields at most the requested count.
  double lo = 0.0, hi = 1.0;
  std::vector<std::size_t> best = greedy_area_sizes(sorted, hi);
  for (int iter = 0; iter < 100; ++iter) {
    const double mid = 0.5 * (lo + hi);
    auto sizes = greedy_area_sizes(sorted, mid);
    if (sizes.size() > bins) {
      lo = mid;
    } else {
      hi = mid;
      best = std::move(sizes);
    }
  }
  return groups_from_sorted(view, order, best);
}

BinSummary bin_sweep(const BinaryView& view) {
  const std::size_t n = view.size();
  const auto order = confidence_order(view);
  if (n < 2) return groups_from_sorted(view, order, {n});
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] + view.y[order[j]];
  std::size_t best = 1;
  for (std::size_t b = 2; b <= n; ++b) {
    const auto sizes = equal_mass_sizes(n, b);
    std::size_t start = 0;
    double prev = -1.0;
    bool monotone = true;
    for (std::size_t s : sizes) {
      const double m = (prefix[start + s] - prefix[start]) / static_cast<double>(s);
      if (m < prev) {
        monotone = false;
        break;
      }
      prev = m;
      start += s;
    }
    if (monotone) best = b;
  }
  return groups_from_sorted(view, order, equal_mass_sizes(n, best));
}

std::vector<std::vector<std::size_t>> bin_mvms(const std::vector<double>& points,
                                               std::size_t dims,
                                               std::size_t min_count) {
  if (min_count < 1) throw Error(ErrorCode::kInvalidArgument, "min_count must be >= 1");
  if (dims == 0 || points.size() % dims != 0) {
    throw Error(ErrorCode::kDimensionMismatch, "point matrix shape");
  }
  const std::size_t n = points.size() / dims;
  std::vector<std::vector<std::size_t>> cells;
  std::vector<std::vector<std::size_t>> stack;
  stack.emplace_back(n);
  std::iota(stack.back().begin(), stack.back().end(), 0);
  while (!stack.empty()) {
    auto node = std::move(stack.back());
    stack.pop_back();
    const double m = static_cast<double>(node.size());
    std::size_t best_dim = 0;
    double best_var = 0.0, best_mean = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      double s = 0.0, ss = 0.0;
      for (std::size_t i : node) {
        const double v = points[i * dims + d];
        s += v;
        ss += v * v;
      }
      const double mu = s / m;
      const double var = ss / m - mu * mu;
      if (var > best_var) {
        best_var = var;
        best_dim = d;
        best_mean = mu;
      }
    }
    std::vector<std::size_t> left, right;
    if (best_var > 1e-15) {
      for (std::size_t i : node) {
        (points[i * dims + best_dim] < best_mean ? left : right).push_back(i);
      }
    }
    if (left.size() < min_count || right.size() < min_count) {
      cells.push_back(std::move(node));
      continue;
    }
    // Right child pushed first so cells come out in ascending order.
    stack.push_back(std::move(right));
    stack.push_back(std::move(left));
  }
  return cells;
}

std::vector<double> proximity_scores(const FeatureMatrix& features) {
  const std::size_t n = features.rows;
  if (n == 0 || features.cols == 0 || features.data.size() != n * features.cols) {
    throw Error(ErrorCode::kMissingFeatures, "feature matrix is empty or malformed");
  }
  const std::size_t neighbours = std::min<std::size_t>(10, n - 1);
  std::vector<double> scores(n, 0.0);
  if (neighbours == 0) return scores;
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t d = 0; d < features.cols; ++d) {
        const double diff = features.at(i, d) - features.at(j, d);
        s += diff * diff;
      }
      dist[j] = std::sqrt(s);
    }
    dist[i] = std::numeric_limits<double>::infinity();
    std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(neighbours),
                      dist.end());
    double total = 0.0;
    for (std::size_t j = 0; j < neighbours; ++j) total += dist[j];
    scores[i] = total / static_cast<double>(neighbours);
  }
  return scores;
}

BinSummary bin_proximity_grid(const BinaryView& view,
                              const FeatureMatrix& features, std::size_t bins,
                              std::size_t proximity_bins) {
  if (features.rows != view.size()) {
    throw Error(ErrorCode::kMissingFeatures, "features do not cover every point");
  }
  if (proximity_bins < 1) {
    throw Error(ErrorCode::kInvalidArgument, "proximity bin count must be >= 1");
  }
  const auto prox = proximity_scores(features);
  const BinSummary conf_bins = bin_equal_mass(view, bins);
  BinaryView prox_view;
  prox_view.c = prox;
  prox_view.y = view.y;
  if (proximity_bins > view.size()) {
    throw Error(ErrorCode::kBinsExceedPoints, "more proximity bins than points");
  }
  std::vector<std::size_t> conf_of(view.size()), prox_of(view.size());
  for (std::size_t b = 0; b < conf_bins.size(); ++b) {
    for (std::size_t i : conf_bins[b].members) conf_of[i] = b;
  }
  // Equal-mass over proximity, but tied scores never straddle a boundary.
  const auto sorted = confidence_order(prox_view);
  const auto sizes = equal_mass_sizes(view.size(), proximity_bins);
  std::size_t h = 0, filled = 0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    while (filled == sizes[h]) {
      ++h;
      filled = 0;
    }
    ++filled;
    const bool tie = j > 0 && prox[sorted[j]] == prox[sorted[j - 1]];
    prox_of[sorted[j]] = tie ? prox_of[sorted[j - 1]] : h;
  }
  std::vector<std::vector<std::size_t>> cells(bins * proximity_bins);
  for (std::size_t i = 0; i < view.size(); ++i) {
    cells[conf_of[i] * proximity_bins + prox_of[i]].push_back(i);
  }
  BinSummary out;
  out.reserve(cells.size());
  for (std::size_t b = 0; b < bins; ++b) {
    for (std::size_t h = 0; h < proximity_bins; ++h) {
      Bin cell = summarize_bin(view, std::move(cells[b * proximity_bins + h]),
                               view.size(), conf_bins[b].lo, conf_bins[b].hi);
      cell.conf_index = b;
      cell.prox_index = h;
      out.push_back(std::move(cell));
    }
  }
  return out;
}

BinSummary apply_binning(const BinaryView& view, const BinningSpec& spec,
                         const FeatureMatrix* features) {
  switch (spec.scheme) {
    case BinScheme::kEqualWidth: return bin_equal_width(view, spec.bins);
    case BinScheme::kEqualMass: return bin_equal_mass(view, spec.bins);
    case BinScheme::kEqualArea: return bin_equal_area(view, spec.bins);
    case BinScheme::kSweep: return bin_sweep(view);
    case BinScheme::kMvms: {
      auto cells = bin_mvms(view.c, 1, spec.min_count);
      BinSummary out;
      for (auto& cell : cells) {
        double lo = 1.0, hi = 0.0;
        for (std::size_t i : cell) {
          lo = std::min(lo, view.c[i]);
          hi = std::max(hi, view.c[i]);
        }
        out.push_back(summarize_bin(view, std::move(cell), view.size(), lo, hi));
      }
      std::sort(out.begin(), out.end(),
                [](const Bin& a, const Bin& b) { return a.mean_conf < b.mean_conf; });
      return out;
    }
    case BinScheme::kProximityGrid:
      if (features == nullptr) {
        throw Error(ErrorCode::kMissingFeatures, "proximity binning needs features");
      }
      return bin_proximity_grid(view, *features, spec.bins, spec.proximity_bins);
    case BinScheme::kSliding:
    case BinScheme::kKnn:
      break;
  }
  throw Error(ErrorCode::kInvalidArgument,
              std::string(BinSchemeName(spec.scheme)) + " bins overlap and do not partition");
}

}  // namespace calmet

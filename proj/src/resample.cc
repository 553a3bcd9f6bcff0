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

#include "calmet/resample.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "calmet/binning.h"
#include "calmet/stats.h"

namespace calmet {

CalibrationMap binned_calibration_map(const BinaryView& view, std::size_t bins) {
  const BinSummary summary = bin_equal_mass(view, std::min(bins, view.size()));
  std::vector<double> lo, hi, value;
  for (const Bin& b : summary) {
    if (b.count == 0) continue;
    lo.push_back(b.lo);
    hi.push_back(b.hi);
    value.push_back(b.mean_outcome);
  }
  CalibrationMap map;
  map.provenance = MapProvenance::kBinned;
  map.eval = [lo, hi, value](double c) {
    // First bin whose upper edge exceeds c; past the last edge, the last bin.
    const auto it = std::upper_bound(hi.begin(), hi.end(), c);
    const auto idx = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        it - hi.begin(), static_cast<std::ptrdiff_t>(hi.size()) - 1));
    return value[idx];
  };
  return map;
}

Interval percentile_interval(std::vector<double> values, double level) {
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }),
               values.end());
  if (values.empty()) throw Error(ErrorCode::kResampleFailure, "no successful rounds");
  std::sort(values.begin(), values.end());
  const double r = static_cast<double>(values.size());
  const double tail = (1.0 - level) / 2.0;
  // The slack keeps e.g. 0.05 * 100 from flooring to 4.
  constexpr double kSlack = 1e-9;
  auto lo = static_cast<std::size_t>(std::floor(tail * r + kSlack));
  auto hi = static_cast<std::size_t>(std::ceil((1.0 - tail) * r - kSlack));
  lo = std::min(lo, values.size() - 1);
  hi = std::clamp<std::size_t>(hi, 1, values.size()) - 1;
  return {values[lo], values[std::max(lo, hi)]};
}

namespace {

void check_spec(const ResampleSpec& spec) {
  if (spec.rounds < 1) throw Error(ErrorCode::kInvalidArgument, "rounds must be >= 1");
  if (!(spec.ci_level > 0.0 && spec.ci_level < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "ci_level must be in (0,1)");
  }
}

MetricResult finish(MetricResult base, const std::vector<double>& values, const ResampleSpec& spec) {
  const auto failed = static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }));
  if (10 * failed > spec.rounds) {
    throw Error(ErrorCode::kResampleFailure,
                std::to_string(failed) + " of " + std::to_string(spec.rounds) + " rounds failed");
  }
  base.ci = percentile_interval(values, spec.ci_level);
  base.details["rounds"] = static_cast<double>(spec.rounds);
  base.details["failed_rounds"] = static_cast<double>(failed);
  return base;
}

template <typename Fn>
double guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

std::vector<double> resample_values(const ViewMetric& fn, const BinaryView& view,
                                    const ResampleSpec& spec) {
  check_spec(spec);
  if (view.size() == 0) throw Error(ErrorCode::kTooFewPoints, "empty input");
  CalibrationMap map;
  if (spec.kind == ResampleKind::kConsistency) {
    map = spec.map ? *spec.map : binned_calibration_map(view);
  }
  const std::size_t n = view.size();
  std::vector<double> out(spec.rounds);
  BinaryView draw = view;
  for (std::size_t r = 0; r < spec.rounds; ++r) {
    Rng rng(derive_seed(spec.seed, r));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = rng.index(n);
      draw.c[i] = view.c[j];
      draw.y[i] = view.y[j];
    }
    if (spec.kind == ResampleKind::kConsistency) {
      for (std::size_t i = 0; i < n; ++i) {
        draw.y[i] = rng.bernoulli(std::clamp(map(draw.c[i]), 0.0, 1.0)) ? 1.0 : 0.0;
      }
    }
    out[r] = guarded([&] { return fn(draw).value; });
  }
  return out;
}

MetricResult resample_ci(const ViewMetric& fn, const BinaryView& view, const ResampleSpec& spec) {
  auto values = resample_values(fn, view, spec);
  return finish(fn(view), values, spec);
}

MetricResult resample_ci(const DatasetMetric& fn, const Dataset& ds, const ResampleSpec& spec) {
  check_spec(spec);
  if (ds.n() == 0) throw Error(ErrorCode::kTooFewPoints, "empty input");
  if (spec.kind == ResampleKind::kConsistency) {
    if (ds.k() != 2) throw Error(ErrorCode::kInvalidArgument, "consistency resampling needs K = 2");
    ViewMetric vf = [&fn](const BinaryView& v) {
      std::vector<int> y(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) y[i] = v.y[i] > 0.5 ? 1 : 0;
      return fn(make_binary_dataset(y, v.c));
    };
    return finish(fn(ds), resample_values(vf, native_binary_view(ds), spec), spec);
  }
  const std::size_t n = ds.n(), k = ds.k();
  std::vector<double> out(spec.rounds);
  for (std::size_t r = 0; r < spec.rounds; ++r) {
    Rng rng(derive_seed(spec.seed, r));
    std::vector<int> labels(n);
    std::vector<double> probs(n * k);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = rng.index(n);
      labels[i] = ds.label(j);
      const auto row = ds.row(j);
      std::copy(row.begin(), row.end(), probs.begin() + static_cast<std::ptrdiff_t>(i * k));
    }
    out[r] = guarded([&] { return fn(make_dataset(std::move(labels), std::move(probs), k)).value; });
  }
  return finish(fn(ds), out, spec);
}

}  // namespace calmet

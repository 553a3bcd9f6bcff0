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

// Bootstrap and consistency resampling for percentile confidence intervals
// around any metric.

#ifndef CALMET_RESAMPLE_H_
#define CALMET_RESAMPLE_H_

#include <cstdint>
#include <functional>
#include <optional>

#include "calmet/core.h"
#include "calmet/kernelcurve.h"

namespace calmet {

enum class ResampleKind { kBootstrap, kConsistency };

struct ResampleSpec {
  ResampleKind kind = ResampleKind::kBootstrap;
  std::size_t rounds = 1000;
  std::uint64_t seed = 0;
  double ci_level = 0.95;
  // Consistency only; defaults to the 15-bin equal-mass binned map.
  std::optional<CalibrationMap> map;
};

using ViewMetric = std::function<MetricResult(const BinaryView&)>;
using DatasetMetric = std::function<MetricResult(const Dataset&)>;

// Piecewise-constant map from 15 equal-mass bins: the bin's mean outcome.
CalibrationMap binned_calibration_map(const BinaryView& view, std::size_t bins = 15);

// Resampled round values in round order; failed rounds are NaN.
std::vector<double> resample_values(const ViewMetric& fn, const BinaryView& view,
                                    const ResampleSpec& spec);

// Point estimate from the original data, ci from the resampled values.
// details: "rounds", "failed_rounds". Throws ResampleFailure when more than
// 10% of rounds fail.
MetricResult resample_ci(const ViewMetric& fn, const BinaryView& view, const ResampleSpec& spec);
// Bootstrap resamples whole rows; consistency needs a binary dataset.
MetricResult resample_ci(const DatasetMetric& fn, const Dataset& ds, const ResampleSpec& spec);

// Order-statistic percentile interval of finite values.
Interval percentile_interval(std::vector<double> values, double level);

}  // namespace calmet

#endif  // CALMET_RESAMPLE_H_

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

// Cumulative-difference calibration metrics with Brownian-motion tests.
// Points are accumulated in ascending confidence order with stable ties.

#ifndef CALMET_CUMULATIVE_H_
#define CALMET_CUMULATIVE_H_

#include <cstddef>
#include <vector>

#include "calmet/core.h"

namespace calmet {

struct CumulativeTrace {
  std::vector<double> cdp;          // length N + 1, cdp[0] = 0
  std::vector<std::size_t> order;   // input index of each accumulated point
  double sigma_n = 0.0;
};

CumulativeTrace cdp(const BinaryView& view);

enum class EcceKind { kMad, kRange };

// Maximum absolute deviation or range of the cumulative trace. The p-value is
// omitted (details["degenerate_null"] = 1) when every c is 0 or 1.
MetricResult ecce(const BinaryView& view, EcceKind kind);

enum class TopREvent { kTopSet, kRthClass };

// ECCE-MAD on the event "label among the top r classes" (confidence: their
// summed probability) or "label is the r-th most likely class".
MetricResult ks_top_r(const Dataset& ds, std::size_t r, TopREvent event = TopREvent::kTopSet);

}  // namespace calmet

#endif  // CALMET_CUMULATIVE_H_

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

// Diagram data emitters. Only tables are produced; plotting is left to the
// consumer.

#ifndef CALMET_REPORT_H_
#define CALMET_REPORT_H_

#include <cstddef>
#include <string>
#include <vector>

#include "calmet/binning.h"
#include "calmet/core.h"

namespace calmet {

enum class DiagramStyle { kLine, kBar, kTiltedRoof };
const char* DiagramStyleName(DiagramStyle s);

struct DiagramRow {
  std::size_t bin = 0;
  std::size_t count = 0;
  bool has_marker = false;  // false for empty bins
  double mean_conf = 0.0;
  double mean_outcome = 0.0;
  double std_error = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  // Tilted-roof style: unit-slope roof through (mean_conf, mean_outcome).
  double roof_lo = 0.0;
  double roof_hi = 0.0;
};

struct DiagramTable {
  std::string scheme;
  DiagramStyle style = DiagramStyle::kLine;
  std::size_t bins = 0;
  std::size_t n = 0;
  std::vector<DiagramRow> rows;
};

DiagramTable reliability_table(const BinaryView& view, const BinningSpec& binning,
                               DiagramStyle style = DiagramStyle::kLine);

struct SimplexRow {
  std::size_t cell = 0;
  std::size_t count = 0;
  std::vector<double> tail;  // mean one-hot outcome
  std::vector<double> head;  // mean predicted vector
};

struct SimplexTable {
  std::size_t depth = 0;
  std::vector<SimplexRow> rows;  // occupied cells only, ascending id
};

// Cell of a probability vector in the depth-d triangular subdivision of the
// simplex over (p0, p1); ids run 0..d*d-1.
std::size_t simplex_cell(double p0, double p1, std::size_t depth);

SimplexTable simplex_table(const Dataset& ds, std::size_t depth = 5);

struct BrierCurve {
  std::vector<double> cost;   // uniform grid on [0, 1]
  std::vector<double> brier;  // BC at each grid point
  std::vector<double> cost_curve;  // lower envelope of the per-threshold lines
  double area = 0.0;  // trapezoid area under the Brier curve
};

// Grid of `grid` intervals (grid + 1 points). F_k counts confidences <= c.
BrierCurve brier_curve(const BinaryView& view, std::size_t grid = 1000);

}  // namespace calmet

#endif  // CALMET_REPORT_H_

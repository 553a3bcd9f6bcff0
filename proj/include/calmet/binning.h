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

// Bin-assignment schemes shared by the bin-based metrics and the diagram
// emitters. Edges are half-open [lo, hi) except the last bin, which is
// closed at 1.

#ifndef CALMET_BINNING_H_
#define CALMET_BINNING_H_

#include <cstddef>
#include <vector>

#include "calmet/core.h"

namespace calmet {

enum class BinScheme {
  kEqualWidth,
  kEqualMass,
  kEqualArea,
  kSweep,
  kSliding,
  kKnn,
  kMvms,
  kProximityGrid,
};

const char* BinSchemeName(BinScheme scheme);
BinScheme ParseBinScheme(const std::string& name);

struct BinningSpec {
  BinScheme scheme = BinScheme::kEqualWidth;
  std::size_t bins = 15;
  std::size_t window = 0;        // sliding
  std::size_t neighbours = 0;    // knn
  std::size_t min_count = 1000;  // mvms
  std::size_t proximity_bins = 10;

  static BinningSpec EqualWidth(std::size_t b) { return {BinScheme::kEqualWidth, b}; }
  static BinningSpec EqualMass(std::size_t b) { return {BinScheme::kEqualMass, b}; }
};

struct Bin {
  std::size_t count = 0;
  double mass = 0.0;
  // Undefined (NaN) when the bin is empty.
  double mean_conf = 0.0;
  double mean_outcome = 0.0;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::size_t> members;
  // Grid coordinates for two-dimensional schemes.
  std::size_t conf_index = 0;
  std::size_t prox_index = 0;
};

using BinSummary = std::vector<Bin>;

// Row-major feature matrix for proximity-aware binning.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Fills count/mass/means for the given member lists over `total` points.
Bin summarize_bin(const BinaryView& view, std::vector<std::size_t> members,
                  std::size_t total, double lo, double hi);

BinSummary bin_equal_width(const BinaryView& view, std::size_t bins);
BinSummary bin_equal_mass(const BinaryView& view, std::size_t bins);
BinSummary bin_equal_area(const BinaryView& view, std::size_t bins);
BinSummary bin_sweep(const BinaryView& view);

// Points sorted by confidence, ties in input order.
std::vector<std::size_t> confidence_order(const BinaryView& view);

// Recursive max-variance mean-split partition of the rows of `points`
// (N x d, row-major). Returns member lists of the leaf cells.
std::vector<std::vector<std::size_t>> bin_mvms(const std::vector<double>& points,
                                               std::size_t dims,
                                               std::size_t min_count);

// Mean Euclidean distance of every row to its ten nearest other rows.
std::vector<double> proximity_scores(const FeatureMatrix& features);

// Equal-mass confidence bins crossed with equal-mass proximity bins; cell
// (b, h) is stored at index b * H + h.
BinSummary bin_proximity_grid(const BinaryView& view,
                              const FeatureMatrix& features, std::size_t bins,
                              std::size_t proximity_bins);

// Dispatches the partitioning schemes. kMvms bins the view's confidences;
// kProximityGrid requires `features`. Overlapping schemes (kSliding, kKnn)
// are not partitions and are rejected here.
BinSummary apply_binning(const BinaryView& view, const BinningSpec& spec,
                         const FeatureMatrix* features = nullptr);

}  // namespace calmet

#endif  // CALMET_BINNING_H_

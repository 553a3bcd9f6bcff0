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

// Canonical data model: labelled probability predictions, binary projections
// of multiclass predictions, decomposition code matrices and the metric
// result record shared by every metric family.

#ifndef CALMET_CORE_H_
#define CALMET_CORE_H_

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace calmet {

enum class ErrorCode {
  kDimensionMismatch,
  kNonStochasticRow,
  kOutOfRangeProbability,
  kLabelOutOfRange,
  kClassIndexOutOfRange,
  kInvalidArgument,
  kBinsExceedPoints,
  kMissingFeatures,
  kBoundaryConfidence,
  kZeroDenominator,
  kDegenerateDenominator,
  kEmptyAfterFilter,
  kNoEligibleBins,
  kSingletonBin,
  kDegenerateBinConfidence,
  kTooFewBins,
  kIncompletePartition,
  kWindowTooLarge,
  kNoFixedPoint,
  kTooFewPoints,
  kFitFailure,
  kSeparationFailure,
  kSingularDesign,
  kNoDetections,
  kTooFewDetections,
  kNegativeExtent,
  kParseError,
  kWrongClassCount,
  kSingleClass,
  kConfigError,
  kResampleFailure,
};

const char* ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type; `code()`
// identifies the failure class independent of the message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Labels in {0..K-1} plus an N x K row-stochastic probability matrix.
// Immutable after construction.
class Dataset {
 public:
  Dataset() = default;

  std::size_t n() const { return labels_.size(); }
  std::size_t k() const { return k_; }
  const std::vector<int>& labels() const { return labels_; }
  int label(std::size_t i) const { return labels_[i]; }
  std::span<const double> row(std::size_t i) const {
    return {probs_.data() + i * k_, k_};
  }
  double prob(std::size_t i, std::size_t cls) const {
    return probs_[i * k_ + cls];
  }
  const std::vector<double>& flat_probs() const { return probs_; }

  // Class proportions (y-bar): fraction of labels equal to each class.
  std::vector<double> class_proportions() const;

 private:
  friend Dataset make_dataset(std::vector<int>, std::vector<double>,
                              std::size_t);
  std::vector<int> labels_;
  std::vector<double> probs_;
  std::size_t k_ = 0;
};

// Validates and (when within 1e-6 of stochastic) renormalises the rows.
// `probs` is row-major with `k` columns.
Dataset make_dataset(std::vector<int> labels, std::vector<double> probs,
                     std::size_t k);
Dataset make_dataset(const std::vector<int>& labels,
                     const std::vector<std::vector<double>>& probs);

// Binary dataset from outcomes y in {0,1} and class-1 confidences c; stored
// with rows (1 - c, c).
Dataset make_binary_dataset(const std::vector<int>& y,
                            const std::vector<double>& c);

enum class ViewMode { kNativeBinary, kTopLabel, kOneVsRest };

// Binary projection (y_i, c_i) used by every binary metric.
struct BinaryView {
  std::vector<double> y;
  std::vector<double> c;
  ViewMode mode = ViewMode::kNativeBinary;
  int cls = 1;

  std::size_t size() const { return c.size(); }
};

// Builds a view directly from outcome/confidence vectors.
BinaryView make_view(std::vector<double> y, std::vector<double> c);

// Index of the largest entry; ties resolve to the lowest index.
std::size_t argmax(std::span<const double> row);

BinaryView top_label_view(const Dataset& ds);
BinaryView ovr_view(const Dataset& ds, std::size_t cls);
// Class-1 view of a binary dataset.
BinaryView native_binary_view(const Dataset& ds);

// Entries over {-1, 0, +1}; columns are binary sub-problems, rows classes.
struct CodeMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<int> entries;  // row-major

  int at(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }
};

enum class CodeKind { kOneVsRest, kPairwise };
CodeMatrix code_matrix(CodeKind kind, std::size_t k);

double accuracy(const Dataset& ds);

enum class Orientation { kZeroIsPerfect, kOneIsPerfect, kSignedZeroPerfect };
const char* OrientationName(Orientation o);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// One row of a per-bin detail table.
struct BinRow {
  std::size_t count = 0;
  double mass = 0.0;
  double mean_conf = 0.0;
  double mean_outcome = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct MetricResult {
  std::string name;
  double value = 0.0;
  Interval range{0.0, 1.0};
  Orientation orientation = Orientation::kZeroIsPerfect;
  std::optional<double> p_value;
  std::optional<Interval> ci;
  std::map<std::string, double> details;
  std::vector<BinRow> bins;
};

MetricResult make_result(std::string name, double value, Interval range,
                         Orientation orientation = Orientation::kZeroIsPerfect);

}  // namespace calmet

#endif  // CALMET_CORE_H_

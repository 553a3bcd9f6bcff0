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

#include "calmet/core.h"

#include <cmath>
#include <sstream>
#include <utility>

namespace calmet {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonStochasticRow: return "NonStochasticRow";
    case ErrorCode::kOutOfRangeProbability: return "OutOfRangeProbability";
    case ErrorCode::kLabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::kClassIndexOutOfRange: return "ClassIndexOutOfRange";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kBinsExceedPoints: return "BinsExceedPoints";
    case ErrorCode::kMissingFeatures: return "MissingFeatures";
    case ErrorCode::kBoundaryConfidence: return "BoundaryConfidence";
    case ErrorCode::kZeroDenominator: return "ZeroDenominator";
    case ErrorCode::kDegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::kEmptyAfterFilter: return "EmptyAfterFilter";
    case ErrorCode::kNoEligibleBins: return "NoEligibleBins";
    case ErrorCode::kSingletonBin: return "SingletonBin";
    case ErrorCode::kDegenerateBinConfidence: return "DegenerateBinConfidence";
    case ErrorCode::kTooFewBins: return "TooFewBins";
    case ErrorCode::kIncompletePartition: return "IncompletePartition";
    case ErrorCode::kWindowTooLarge: return "WindowTooLarge";
    case ErrorCode::kNoFixedPoint: return "NoFixedPoint";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kFitFailure: return "FitFailure";
    case ErrorCode::kSeparationFailure: return "SeparationFailure";
    case ErrorCode::kSingularDesign: return "SingularDesign";
    case ErrorCode::kNoDetections: return "NoDetections";
    case ErrorCode::kTooFewDetections: return "TooFewDetections";
    case ErrorCode::kNegativeExtent: return "NegativeExtent";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kWrongClassCount: return "WrongClassCount";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kResampleFailure: return "ResampleFailure";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

std::vector<double> Dataset::class_proportions() const {
  std::vector<double> props(k_, 0.0);
  if (labels_.empty()) return props;
  for (int label : labels_) props[static_cast<std::size_t>(label)] += 1.0;
  for (double& p : props) p /= static_cast<double>(labels_.size());
  return props;
}

Dataset make_dataset(std::vector<int> labels, std::vector<double> probs,
                     std::size_t k) {
  if (k < 2) throw Error(ErrorCode::kDimensionMismatch, "need at least 2 classes");
  if (probs.size() != labels.size() * k) {
    std::ostringstream msg;
    msg << "probability matrix has " << probs.size() << " entries, expected "
        << labels.size() << " x " << k;
    throw Error(ErrorCode::kDimensionMismatch, msg.str());
  }
  const std::size_t n = labels.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= k) {
      std::ostringstream msg;
      msg << "row " << i << ": label " << labels[i] << " not in [0, " << k
          << ")";
      throw Error(ErrorCode::kLabelOutOfRange, msg.str());
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double p = probs[i * k + j];
      if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream msg;
        msg << "row " << i << ": probability " << p << " outside [0, 1]";
        throw Error(ErrorCode::kOutOfRangeProbability, msg.str());
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      std::ostringstream msg;
      msg << "row " << i << " sums to " << sum;
      throw Error(ErrorCode::kNonStochasticRow, msg.str());
    }
    if (sum != 1.0) {
      for (std::size_t j = 0; j < k; ++j) probs[i * k + j] /= sum;
    }
  }
  Dataset ds;
  ds.labels_ = std::move(labels);
  ds.probs_ = std::move(probs);
  ds.k_ = k;
  return ds;
}

Dataset make_dataset(const std::vector<int>& labels,
                     const std::vector<std::vector<double>>& probs) {
  if (probs.size() != labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "labels and probability rows differ in length");
  }
  if (probs.empty()) {
    throw Error(ErrorCode::kDimensionMismatch, "empty dataset");
  }
  const std::size_t k = probs.front().size();
  std::vector<double> flat;
  flat.reserve(probs.size() * k);
  for (const auto& row : probs) {
    if (row.size() != k) {
      throw Error(ErrorCode::kDimensionMismatch, "ragged probability rows");
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return make_dataset(labels, std::move(flat), k);
}

Dataset make_binary_dataset(const std::vector<int>& y,
                            const std::vector<double>& c) {
  if (y.size() != c.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "y and c differ in length");
  }
  std::vector<double> flat;
  flat.reserve(2 * c.size());
  for (double ci : c) {
    if (!(ci >= 0.0 && ci <= 1.0)) {
      throw Error(ErrorCode::kOutOfRangeProbability, "confidence outside [0, 1]");
    }
    flat.push_back(1.0 - ci);
    flat.push_back(ci);
  }
  return make_dataset(y, std::move(flat), 2);
}

BinaryView make_view(std::vector<double> y, std::vector<double> c) {
  if (y.size() != c.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "y and c differ in length");
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c[i] >= 0.0 && c[i] <= 1.0)) {
      throw Error(ErrorCode::kOutOfRangeProbability, "confidence outside [0, 1]");
    }
    if (!(y[i] >= 0.0 && y[i] <= 1.0)) {
      throw Error(ErrorCode::kOutOfRangeProbability, "outcome outside [0, 1]");
    }
  }
  BinaryView view;
  view.y = std::move(y);
  view.c = std::move(c);
  return view;
}

std::size_t argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < row.size(); ++j) {
    if (row[j] > row[best]) best = j;
  }
  return best;
}

BinaryView top_label_view(const Dataset& ds) {
  BinaryView view;
  view.mode = ViewMode::kTopLabel;
  view.cls = -1;
  view.y.reserve(ds.n());
  view.c.reserve(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto row = ds.row(i);
    const std::size_t top = argmax(row);
    view.c.push_back(row[top]);
    view.y.push_back(static_cast<int>(top) == ds.label(i) ? 1.0 : 0.0);
  }
  return view;
}

BinaryView ovr_view(const Dataset& ds, std::size_t cls) {
  if (cls >= ds.k()) {
    throw Error(ErrorCode::kClassIndexOutOfRange, "class index out of range");
  }
  BinaryView view;
  view.mode = ViewMode::kOneVsRest;
  view.cls = static_cast<int>(cls);
  view.y.reserve(ds.n());
  view.c.reserve(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    view.c.push_back(ds.prob(i, cls));
    view.y.push_back(ds.label(i) == static_cast<int>(cls) ? 1.0 : 0.0);
  }
  return view;
}

BinaryView native_binary_view(const Dataset& ds) {
  if (ds.k() != 2) {
    throw Error(ErrorCode::kWrongClassCount, "native binary view needs K = 2");
  }
  BinaryView view = ovr_view(ds, 1);
  view.mode = ViewMode::kNativeBinary;
  return view;
}

CodeMatrix code_matrix(CodeKind kind, std::size_t k) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "code matrix needs k >= 2");
  CodeMatrix m;
  m.rows = k;
  if (kind == CodeKind::kOneVsRest) {
    m.cols = k;
    m.entries.assign(k * k, -1);
    for (std::size_t i = 0; i < k; ++i) m.entries[i * k + i] = 1;
    return m;
  }
  m.cols = k * (k - 1) / 2;
  m.entries.assign(m.rows * m.cols, 0);
  std::size_t col = 0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b, ++col) {
      m.entries[a * m.cols + col] = 1;
      m.entries[b * m.cols + col] = -1;
    }
  }
  return m;
}

double accuracy(const Dataset& ds) {
  if (ds.n() == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if (static_cast<int>(argmax(ds.row(i))) == ds.label(i)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(ds.n());
}

const char* OrientationName(Orientation o) {
  switch (o) {
    case Orientation::kZeroIsPerfect: return "zero-is-perfect";
    case Orientation::kOneIsPerfect: return "one-is-perfect";
    case Orientation::kSignedZeroPerfect: return "signed-zero-perfect";
  }
  return "unknown";
}

MetricResult make_result(std::string name, double value, Interval range,
                         Orientation orientation) {
  MetricResult r;
  r.name = std::move(name);
  r.value = value;
  r.range = range;
  r.orientation = orientation;
  return r;
}

}  // namespace calmet

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

// Per-datum scores averaged over the dataset.

#ifndef CALMET_POINT_H_
#define CALMET_POINT_H_

#include <optional>

#include "calmet/core.h"

namespace calmet {

// Optional clamp applied to probabilities before logarithms or divisions by
// c(1 - c). Unset means exact boundary values yield infinities or errors.
using Clamp = std::optional<double>;

// Multiclass Brier score scaled by 1/(NK). The classical sum over classes
// (scaled by 1/N only) is reported in details["classical"].
MetricResult brier(const Dataset& ds);
MetricResult rbs(const Dataset& ds);

// Binary cross-entropy of a view.
MetricResult nll(const BinaryView& view, Clamp clamp = {});
// Dataset form: multiclass uses the 1/(NK)-scaled log loss of the true class,
// otherwise the binary form on the native (K = 2) or top-label view.
MetricResult nll(const Dataset& ds, bool multiclass, Clamp clamp = {});

enum class FocalVariant { kStandard, kDual, kFcl };

struct FocalOptions {
  double gamma = 2.0;
  FocalVariant variant = FocalVariant::kStandard;
  // Sum over all classes with 1/(NK) scaling instead of the top-label form.
  bool full_class = false;
  double fcl_lambda = 1.0;
  Clamp clamp;
};

MetricResult focal_loss(const Dataset& ds, const FocalOptions& opts = {});

// Signed; positive means over-confident.
MetricResult ecd(const BinaryView& view, Clamp clamp = {});

enum class GlobalBiasKind { kGsb, kMdca, kEo, kOe };

// Single-class (binary view) form.
MetricResult global_bias(const BinaryView& view, GlobalBiasKind kind);
// GSB and MDCA average over all K classes; EO and OE use the class-1 view
// for K = 2 and the top-label view otherwise.
MetricResult global_bias(const Dataset& ds, GlobalBiasKind kind);

MetricResult success_rate(const Dataset& ds);

enum class NormalizedSquareKind { kDss, kNses };
MetricResult normalized_square(const BinaryView& view, NormalizedSquareKind kind,
                               Clamp clamp = {});

// (mean |y - c|^p)^(1/p); p may be kInf.
MetricResult pnorm_error(const BinaryView& view, double p);
MetricResult l1eps(const BinaryView& view, double eps = 1e-4);
MetricResult hinge(const BinaryView& view);

MetricResult spiegelhalter_z(const BinaryView& view);

enum class AlphaKind { kPseudoSpherical, kPower };
// `corrected` applies (score + 1) / K to the power score, which recovers the
// Brier score at alpha = 2.
MetricResult alpha_score(const Dataset& ds, double alpha, AlphaKind kind,
                         bool corrected = false);

MetricResult soft_f1(const BinaryView& view);

enum class RpsKind { kRps, kSarps };
// Classes are ordered by index.
MetricResult rps(const Dataset& ds, RpsKind kind = RpsKind::kRps);

}  // namespace calmet

#endif  // CALMET_POINT_H_

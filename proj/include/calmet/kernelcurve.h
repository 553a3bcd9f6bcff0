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

// Kernel-smoothed and fitted-curve calibration metrics, their bandwidth
// rules and the associated hypothesis tests.

#ifndef CALMET_KERNELCURVE_H_
#define CALMET_KERNELCURVE_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "calmet/core.h"

namespace calmet {

enum class KernelFamily {
  kGaussian,
  kReflectedGaussian,
  kLaplace,
  kEpanechnikov,
  kTriweight,
  kBeta,
  kDirichlet,
};

enum class BandwidthRule { kFixed, kRuleOfThumb, kMedianHeuristic, kCrossValidation };

struct KernelSpec {
  KernelFamily family = KernelFamily::kGaussian;
  BandwidthRule rule = BandwidthRule::kFixed;
  double bandwidth = 0.08;
  std::size_t grid = 1024;
  std::uint64_t seed = 0;  // subsampling for the median heuristic, CV folds

  static KernelSpec Fixed(KernelFamily f, double h) { return {f, BandwidthRule::kFixed, h}; }
};

const char* KernelFamilyName(KernelFamily f);

// Smoothing weight k(c, center) at bandwidth h. Scalar families only; the
// beta kernel uses the density of Beta(center/h + 1, (1 - center)/h + 1).
double kernel_weight(KernelFamily family, double c, double center, double h);

// 1.06 * sd * N^(-1/5).
double rule_of_thumb_bandwidth(const std::vector<double>& x);
// Median of all pairwise distances; above 10^4 points a seeded subsample of
// 10^4 points is used.
double median_heuristic_bandwidth(const std::vector<double>& x, std::uint64_t seed = 0);
// Resolves the spec's rule to a number. Cross-validation picks from a fixed
// candidate grid by 5-fold held-out squared error of the kernel map.
double resolve_bandwidth(const BinaryView& view, const KernelSpec& spec);

enum class MapProvenance {
  kKernel,
  kLoess,
  kPiecewiseLinear,
  kPl3Logit,
  kBetaFit,
  kLogistic,
  kSpline,
  kBinned,
};

struct CalibrationMap {
  std::function<double(double)> eval;
  MapProvenance provenance = MapProvenance::kKernel;

  double operator()(double c) const { return eval(c); }
};

// Normalised local average sum y_i k_i(c) / sum k_i(c). Where no kernel mass
// reaches c, the outcome of the nearest observation is returned.
CalibrationMap kernel_calibration_map(const BinaryView& view, const KernelSpec& spec);

// (1/N) sum |yhat(c_i) - c_i|^p; p = 2 is MSCE, p = 1 is SECE.
MetricResult kernel_curve_ce(const BinaryView& view, const KernelSpec& spec, double p);
inline MetricResult msce(const BinaryView& view) {
  return kernel_curve_ce(view, KernelSpec::Fixed(KernelFamily::kGaussian, 0.08), 2.0);
}
inline MetricResult sece(const BinaryView& view) {
  return kernel_curve_ce(view, KernelSpec::Fixed(KernelFamily::kGaussian, 0.01), 1.0);
}

// Residual smoothing error at a fixed bandwidth with a reflected Gaussian
// kernel on the grid g / G, g = 1..G. `fast` convolves grid-binned residual
// mass instead of summing over points; it is used automatically only when
// sigma is at least two grid steps.
double smece_at(const BinaryView& view, double sigma, std::size_t grid = 1024,
                bool fast = false);
// Fixed point sigma = SMECE(sigma) by bisection on [1e-6, 1].
MetricResult smece(const BinaryView& view, std::size_t grid = 1024);

enum class KdeKind { kBeta, kDirichlet };
// Leave-one-out kernel estimate of the calibration error with beta (binary,
// de-biased squared form) or Dirichlet (multiclass p-norm) kernels. The
// Dirichlet form is de-biased for p = 2 and a plug-in estimate otherwise.
MetricResult kde_ce(const Dataset& ds, KdeKind kind, double p = 2.0, double bandwidth = 0.1);

enum class PairwiseKind { kMmce, kLkce, kSkceB, kSkceUq, kSkceUl };
struct PairwiseOptions {
  // Laplace width. Unset means 0.4 for MMCE, 1 for LKCE and the median
  // heuristic for the SKCE family.
  std::optional<double> bandwidth;
  // Shuffle before pairing (SKCE-UL only).
  std::optional<std::uint64_t> shuffle_seed;
};
// MMCE and LKCE act on the top-label view (or the class-1 view for K = 2);
// the SKCE family uses full probability vectors. SKCE-UL carries a p-value.
MetricResult pairwise_kernel_ce(const Dataset& ds, PairwiseKind kind,
                                const PairwiseOptions& opts = {});
MetricResult pairwise_kernel_ce(const BinaryView& view, PairwiseKind kind,
                                const PairwiseOptions& opts = {});

// Grid integral of |yhat(t) - t|^p weighted by the confidence density, both
// smoothed with a triweight kernel at the rule-of-thumb width.
MetricResult skde(const BinaryView& view, std::size_t grid = 1024, double p = 1.0);

struct ReliabilityMap {
  std::vector<double> cluster_conf;
  std::vector<double> cluster_reliability;
  CalibrationMap calibration;
  CalibrationMap reliability;
};
// Unbiased single-cluster reliability estimate.
double cluster_reliability(double sum_y, std::size_t m, double yhat);
ReliabilityMap reliability_map(const BinaryView& view, std::size_t cluster_size = 10);

// Exact optimum of the 1-Lipschitz weighted residual programme.
MetricResult smooth_ce(const BinaryView& view);

MetricResult lsece(const BinaryView& view, double sigma = 0.1, std::size_t samples = 0,
                   std::uint64_t seed = 0);

// ICI, E50, E90 and Emax of a degree-2, span-0.75 LOESS fit.
std::vector<MetricResult> loess_metrics(const BinaryView& view);

MetricResult eci(const Dataset& ds);

enum class FottFamily { kPiecewiseLinear, kPl3 };
struct FottOptions {
  FottFamily family = FottFamily::kPiecewiseLinear;
  // Zero selects the count in [1, max_segments] by cross-validation.
  std::size_t segments = 0;
  std::size_t max_segments = 8;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
};
struct FottFit {
  CalibrationMap map;
  std::size_t segments = 0;
  MetricResult metric;
};
FottFit fott_fit(const BinaryView& view, const FottOptions& opts = {});

struct CoxResult {
  MetricResult intercept;
  MetricResult slope;
};
CoxResult cox_intercept_slope(const BinaryView& view);

struct SbctResult {
  MetricResult metric;
  CalibrationMap map;
  double a = 0.0, b = 0.0, m = 0.0;
};
SbctResult sbct_fit(const BinaryView& view, std::size_t grid = 1001);
MetricResult sbct(const BinaryView& view, std::size_t grid = 1001);

enum class PwsCovariance { kOls, kHc0 };
// HC0 is the default: outcomes are Bernoulli, so the homoscedastic OLS
// covariance is not consistent and skews the null distribution.
MetricResult pws(const BinaryView& view, PwsCovariance cov = PwsCovariance::kHc0);

}  // namespace calmet

#endif  // CALMET_KERNELCURVE_H_

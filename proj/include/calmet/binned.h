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

// Bin-based calibration metrics: plain, signed, soft, de-biased, overlapping
// and test-statistic variants.

#ifndef CALMET_BINNED_H_
#define CALMET_BINNED_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "calmet/binning.h"
#include "calmet/core.h"

namespace calmet {

// (sum_b p_b |ybar_b - cbar_b|^p)^(1/p); p = kInf gives the largest gap over
// occupied bins. Empty bins carry zero mass.
double binned_gap(const BinSummary& bins, double p);
// Per-bin table attached to results.
std::vector<BinRow> bin_rows(const BinSummary& bins);

MetricResult binned_ce(const BinaryView& view, const BinningSpec& spec,
                       double p = 1.0, const FeatureMatrix* features = nullptr);

enum class ClassWeighting { kEqual, kProportional };

// Per-class one-vs-rest binned errors.
std::vector<double> per_class_ce(const Dataset& ds, const BinningSpec& spec,
                                 double p = 1.0);
// Weighted sum of per-class errors. Explicit `weights` override `weighting`
// and must sum to one.
MetricResult classwise_ce(const Dataset& ds, const BinningSpec& spec, double p = 1.0,
                          ClassWeighting weighting = ClassWeighting::kEqual,
                          const std::vector<double>& weights = {});

// Equal-mass ECE over points whose confidence exceeds `threshold`.
MetricResult tace(const BinaryView& view, std::size_t bins, double threshold = 0.01);
// Multiclass form: per-class thresholded equal-mass ECE averaged over the
// classes that keep at least one point.
MetricResult tace(const Dataset& ds, std::size_t bins, double threshold = 0.01);
// Top-k most confident points, equal-mass with max(1, floor(log10 k)) bins.
MetricResult ece_at_k(const BinaryView& view, std::size_t k);
// Mean of ece_at_k over ten uniformly spaced k in (0, l].
MetricResult avg_ece_at_l(const BinaryView& view, std::size_t l);

// Entropy exponent -sum g log g / log K of class proportions.
double imbalance_alpha(const std::vector<double>& class_props);
MetricResult ice_imbalanced(const BinaryView& view, const BinningSpec& spec,
                            const std::vector<double>& class_props);

MetricResult rbece(const BinaryView& view, const BinningSpec& spec,
                   std::size_t min_count = 10);

MetricResult ece_lb(const BinaryView& view, const BinningSpec& spec, double p = 1.0);

// Contraharmonic mean; zero when every entry is zero.
MetricResult cece(const std::vector<double>& per_class);

MetricResult esce(const BinaryView& view, const BinningSpec& spec, bool averaged = false);
// Per-class signed errors grouped by sign, micro-averaged by class size
// within each group and macro-averaged by class count across groups.
MetricResult wsmcs(const Dataset& ds, const BinningSpec& spec);

enum class SoftBinKind { kSbece, kDece };
MetricResult soft_binned_ece(const BinaryView& view, std::size_t bins, double tau = 1e-3,
                             double p = 1.0, SoftBinKind kind = SoftBinKind::kSbece);
// Soft bin sizes s_b (exposed for checks).
std::vector<double> soft_bin_sizes(const BinaryView& view, std::size_t bins, double tau,
                                   SoftBinKind kind);

enum class DebiasKind { kCe2Db, kEceDb, kDpe };
struct DebiasOptions {
  std::size_t mc_runs = 1000;
  std::uint64_t seed = 0;
};
MetricResult debiased_ce(const BinaryView& view, const BinningSpec& spec, DebiasKind kind,
                         const DebiasOptions& opts = {});
// De-biased squared-l2 plugin on precomputed bins.
double dpe_from_bins(const BinaryView& view, const BinSummary& bins);

MetricResult piece(const BinaryView& view, const FeatureMatrix& features,
                   std::size_t bins = 15, std::size_t proximity_bins = 10);

// One grouping of the points; `group` holds an arbitrary group id per point.
struct Partition {
  std::vector<int> group;
  double weight = 1.0;
};
enum class PceLoss { kAbs, kSquared };
MetricResult pce(const BinaryView& view, const std::vector<Partition>& partitions,
                 PceLoss loss = PceLoss::kAbs);

struct HlOptions {
  // Degrees of freedom of the reference chi-squared; defaults to
  // (occupied bins - 2). No p-value is attached when this is not positive.
  std::optional<double> dof;
};
MetricResult hl_statistic(const BinaryView& view, const BinningSpec& spec,
                          const HlOptions& opts = {});

struct TcalOptions {
  double alpha = 0.05;
  std::size_t mc_runs = 1000;
  std::uint64_t seed = 0;
};
// Bin counts 2, 4, ..., 2^ceil(log2 sqrt N).
std::vector<std::size_t> tcal_ladder(std::size_t n);
MetricResult tcal(const BinaryView& view, const TcalOptions& opts = {});

// Largest k with k <= -log2(eps / 2).
int sice_max_level(double eps);
double rice(const BinaryView& view, int k, std::size_t mc_runs, std::uint64_t seed);
MetricResult sice(const BinaryView& view, double eps = 0.01, std::size_t mc_runs = 100,
                  std::uint64_t seed = 0);

using MapFn = std::function<double(double)>;
MetricResult ece_fott(const MapFn& map, const BinaryView& view, double alpha = 1.0);
// Tilted-roof map of an equal-width binning: c + (ybar_b - cbar_b) in bin b,
// clipped to [0, 1]; identity in empty bins.
MapFn tilted_roof_map(const BinaryView& view, std::size_t bins);
// Equal-width bin count in [lo, hi] minimising held-out squared error of the
// tilted-roof map under `folds`-fold cross-validation.
std::size_t cv_bin_count(const BinaryView& view, std::size_t lo = 2, std::size_t hi = 40,
                         std::size_t folds = 5, std::uint64_t seed = 0);

enum class OverlapKind { kCalBin, kKnn };
// `size` is the window s for CalBin (0 means N/10) or the neighbour count k.
MetricResult overlapping_ce(const BinaryView& view, OverlapKind kind, std::size_t size = 0);

MetricResult hcs(const Dataset& ds, const BinningSpec& spec, double beta = 1.0);
MetricResult wcr(const Dataset& ds);
// sqrt((1 - sqrt(BS)) * WCR).
MetricResult cal_measure(const Dataset& ds);

}  // namespace calmet

#endif  // CALMET_BINNED_H_

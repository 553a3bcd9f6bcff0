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

#include "calmet/binned.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

#include "calmet/point.h"
#include "calmet/stats.h"

namespace calmet {

namespace {

BinaryView subset(const BinaryView& view, const std::vector<std::size_t>& idx) {
  BinaryView out;
  out.mode = view.mode;
  out.cls = view.cls;
  out.y.reserve(idx.size());
  out.c.reserve(idx.size());
  for (std::size_t i : idx) {
    out.y.push_back(view.y[i]);
    out.c.push_back(view.c[i]);
  }
  return out;
}

double gap(const Bin& b) { return std::abs(b.mean_outcome - b.mean_conf); }

std::string ce_name(double p) {
  if (std::isinf(p)) return "mce";
  if (p == 1.0) return "ece";
  if (p == 2.0) return "ce2";
  return "ce_p";
}

void check_p(double p) {
  if (!(p >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "p must be >= 1");
}

}  // namespace

double binned_gap(const BinSummary& bins, double p) {
  check_p(p);
  double acc = 0.0;
  for (const Bin& b : bins) {
    if (b.count == 0) continue;
    if (std::isinf(p)) {
      acc = std::max(acc, gap(b));
    } else {
      acc += b.mass * std::pow(gap(b), p);
    }
  }
  return std::isinf(p) ? acc : std::pow(acc, 1.0 / p);
}

std::vector<BinRow> bin_rows(const BinSummary& bins) {
  std::vector<BinRow> rows;
  rows.reserve(bins.size());
  for (const Bin& b : bins) {
    rows.push_back({b.count, b.mass, b.mean_conf, b.mean_outcome, b.lo, b.hi});
  }
  return rows;
}

MetricResult binned_ce(const BinaryView& view, const BinningSpec& spec, double p,
                       const FeatureMatrix* features) {
  const BinSummary bins = apply_binning(view, spec, features);
  auto r = make_result(ce_name(p), binned_gap(bins, p), {0.0, 1.0});
  r.details["p"] = p;
  r.details["bins"] = static_cast<double>(bins.size());
  r.bins = bin_rows(bins);
  return r;
}

std::vector<double> per_class_ce(const Dataset& ds, const BinningSpec& spec, double p) {
  std::vector<double> out;
  out.reserve(ds.k());
  for (std::size_t k = 0; k < ds.k(); ++k) {
    out.push_back(binned_gap(apply_binning(ovr_view(ds, k), spec), p));
  }
  return out;
}

MetricResult classwise_ce(const Dataset& ds, const BinningSpec& spec, double p,
                          ClassWeighting weighting, const std::vector<double>& weights) {
  std::vector<double> w = weights;
  if (w.empty()) {
    w = weighting == ClassWeighting::kEqual
            ? std::vector<double>(ds.k(), 1.0 / static_cast<double>(ds.k()))
            : ds.class_proportions();
  }
  if (w.size() != ds.k()) throw Error(ErrorCode::kDimensionMismatch, "one weight per class");
  if (std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "class weights must sum to 1");
  }
  const auto per = per_class_ce(ds, spec, p);
  double v = 0.0;
  for (std::size_t k = 0; k < ds.k(); ++k) {
    if (w[k] != 0.0) v += w[k] * per[k];
  }
  const bool proportional = weights.empty() && weighting == ClassWeighting::kProportional;
  auto r = make_result(proportional ? "wsece" : "cwce", v, {0.0, 1.0});
  for (std::size_t k = 0; k < ds.k(); ++k) r.details["class_" + std::to_string(k)] = per[k];
  return r;
}

MetricResult tace(const BinaryView& view, std::size_t bins, double threshold) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < view.size(); ++i) {
    if (view.c[i] >= threshold) keep.push_back(i);
  }
  if (keep.empty()) throw Error(ErrorCode::kEmptyAfterFilter, "no confidence above threshold");
  const BinaryView sub = subset(view, keep);
  const auto b = bin_equal_mass(sub, std::min(bins, sub.size()));
  auto r = make_result("tace", binned_gap(b, 1.0), {0.0, 1.0});
  r.details["threshold"] = threshold;
  r.details["kept"] = static_cast<double>(keep.size());
  r.bins = bin_rows(b);
  return r;
}

MetricResult tace(const Dataset& ds, std::size_t bins, double threshold) {
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < ds.k(); ++k) {
    try {
      total += tace(ovr_view(ds, k), bins, threshold).value;
      ++used;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyAfterFilter) throw;
    }
  }
  if (used == 0) throw Error(ErrorCode::kEmptyAfterFilter, "no confidence above threshold");
  auto r = make_result("tace", total / static_cast<double>(used), {0.0, 1.0});
  r.details["threshold"] = threshold;
  r.details["classes_used"] = static_cast<double>(used);
  return r;
}

MetricResult ece_at_k(const BinaryView& view, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  k = std::min(k, view.size());
  std::vector<std::size_t> order(view.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return view.c[a] > view.c[b]; });
  order.resize(k);
  const BinaryView sub = subset(view, order);
  const auto bins = static_cast<std::size_t>(
      std::max(1.0, std::floor(std::log10(static_cast<double>(k)))));
  auto r = make_result("ece_at_k", binned_gap(bin_equal_mass(sub, bins), 1.0), {0.0, 1.0});
  r.details["k"] = static_cast<double>(k);
  r.details["bins"] = static_cast<double>(bins);
  return r;
}

MetricResult avg_ece_at_l(const BinaryView& view, std::size_t l) {
  if (l == 0) throw Error(ErrorCode::kInvalidArgument, "l must be >= 1");
  std::vector<std::size_t> ks;
  for (std::size_t j = 1; j <= 10; ++j) {
    const std::size_t k = (j * l + 9) / 10;
    if (ks.empty() || ks.back() != k) ks.push_back(k);
  }
  double total = 0.0;
  for (std::size_t k : ks) total += ece_at_k(view, k).value;
  auto r = make_result("avg_ece_at_l", total / static_cast<double>(ks.size()), {0.0, 1.0});
  r.details["l"] = static_cast<double>(l);
  return r;
}

double imbalance_alpha(const std::vector<double>& class_props) {
  if (class_props.size() < 2) return 0.0;
  double h = 0.0;
  for (double g : class_props) {
    if (g > 0.0) h -= g * std::log(g);
  }
  return h / std::log(static_cast<double>(class_props.size()));
}

MetricResult ice_imbalanced(const BinaryView& view, const BinningSpec& spec,
                            const std::vector<double>& class_props) {
  const double alpha = imbalance_alpha(class_props);
  const BinSummary bins = apply_binning(view, spec);
  double num = 0.0, z = 0.0;
  for (const Bin& b : bins) {
    if (b.count == 0) continue;
    const double w = std::pow(b.mass, alpha);
    num += w * gap(b);
    z += w;
  }
  auto r = make_result("ice", num / z, {0.0, 1.0});
  r.details["alpha"] = alpha;
  return r;
}

MetricResult rbece(const BinaryView& view, const BinningSpec& spec, std::size_t min_count) {
  const BinSummary bins = apply_binning(view, spec);
  double total = 0.0;
  std::size_t eligible = 0;
  for (const Bin& b : bins) {
    if (b.count >= min_count && b.count > 0) {
      total += gap(b);
      ++eligible;
    }
  }
  if (eligible == 0) throw Error(ErrorCode::kNoEligibleBins, "no bin reaches min_count");
  auto r = make_result("rbece", total / static_cast<double>(eligible), {0.0, 1.0});
  r.details["eligible_bins"] = static_cast<double>(eligible);
  return r;
}

MetricResult ece_lb(const BinaryView& view, const BinningSpec& spec, double p) {
  check_p(p);
  const BinSummary bins = apply_binning(view, spec);
  double acc = 0.0;
  for (const Bin& b : bins) {
    for (std::size_t i : b.members) {
      const double d = std::abs(b.mean_outcome - view.c[i]);
      acc = std::isinf(p) ? std::max(acc, d) : acc + std::pow(d, p);
    }
  }
  if (!std::isinf(p)) acc = std::pow(acc / static_cast<double>(view.size()), 1.0 / p);
  auto r = make_result("ece_lb", acc, {0.0, 1.0});
  r.details["p"] = p;
  return r;
}

MetricResult cece(const std::vector<double>& per_class) {
  double s = 0.0, s2 = 0.0;
  for (double e : per_class) {
    s += e;
    s2 += e * e;
  }
  return make_result("cece", s > 0.0 ? s2 / s : 0.0, {0.0, 1.0});
}

namespace {

double signed_gap(const BinSummary& bins) {
  double v = 0.0;
  for (const Bin& b : bins) {
    if (b.count > 0) v += b.mass * (b.mean_outcome - b.mean_conf);
  }
  return v;
}

}  // namespace

MetricResult esce(const BinaryView& view, const BinningSpec& spec, bool averaged) {
  if (!averaged) {
    const BinSummary bins = apply_binning(view, spec);
    auto r = make_result("esce", signed_gap(bins), {-1.0, 1.0},
                         Orientation::kSignedZeroPerfect);
    r.details["ece"] = binned_gap(bins, 1.0);
    return r;
  }
  double s = 0.0, e = 0.0;
  constexpr int kGrid = 10;
  for (int j = 0; j < kGrid; ++j) {
    const double width = 0.005 + (0.05 - 0.005) * j / (kGrid - 1);
    const auto b = static_cast<std::size_t>(std::lround(1.0 / width));
    const BinSummary bins = bin_equal_width(view, b);
    s += signed_gap(bins);
    e += binned_gap(bins, 1.0);
  }
  auto r = make_result("esce_avg", s / kGrid, {-1.0, 1.0}, Orientation::kSignedZeroPerfect);
  r.details["ece"] = e / kGrid;
  return r;
}

MetricResult wsmcs(const Dataset& ds, const BinningSpec& spec) {
  const auto props = ds.class_proportions();
  double under_num = 0.0, under_den = 0.0, over_num = 0.0, over_den = 0.0;
  std::size_t under = 0, over = 0;
  for (std::size_t k = 0; k < ds.k(); ++k) {
    const double m = signed_gap(apply_binning(ovr_view(ds, k), spec));
    if (m > 0.0) {
      under_num += props[k] * m;
      under_den += props[k];
      ++under;
    } else if (m < 0.0) {
      over_num += props[k] * m;
      over_den += props[k];
      ++over;
    }
  }
  double v = 0.0;
  if (under + over > 0) {
    const double gu = under_den > 0.0 ? under_num / under_den : 0.0;
    const double go = over_den > 0.0 ? over_num / over_den : 0.0;
    v = (static_cast<double>(under) * gu + static_cast<double>(over) * go) /
        static_cast<double>(under + over);
  }
  auto r = make_result("wsmcs", v, {-1.0, 1.0}, Orientation::kSignedZeroPerfect);
  r.details["under_confident_classes"] = static_cast<double>(under);
  r.details["over_confident_classes"] = static_cast<double>(over);
  return r;
}

namespace {

// Row-major N x B soft membership matrix.
std::vector<double> soft_membership(const BinaryView& view, std::size_t bins, double tau,
                                    SoftBinKind kind) {
  if (!(tau > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tau must be > 0");
  if (bins < 1) throw Error(ErrorCode::kInvalidArgument, "bin count must be >= 1");
  const double nb = static_cast<double>(bins);
  std::vector<double> u(view.size() * bins);
  std::vector<double> logits(bins);
  for (std::size_t i = 0; i < view.size(); ++i) {
    const double c = view.c[i];
    double offset = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
      if (kind == SoftBinKind::kSbece) {
        const double d = c - (static_cast<double>(b) + 0.5) / nb;
        logits[b] = -d * d / tau;
      } else {
        // Bin b + 1 overtakes bin b exactly when c passes the edge (b + 1) / B.
        logits[b] = (static_cast<double>(b + 1) * c - offset) / tau;
        offset += static_cast<double>(b + 1) / nb;
      }
    }
    const double top = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
      logits[b] = std::exp(logits[b] - top);
      z += logits[b];
    }
    for (std::size_t b = 0; b < bins; ++b) u[i * bins + b] = logits[b] / z;
  }
  return u;
}

}  // namespace

std::vector<double> soft_bin_sizes(const BinaryView& view, std::size_t bins, double tau,
                                   SoftBinKind kind) {
  const auto u = soft_membership(view, bins, tau, kind);
  std::vector<double> s(bins, 0.0);
  for (std::size_t i = 0; i < view.size(); ++i) {
    for (std::size_t b = 0; b < bins; ++b) s[b] += u[i * bins + b];
  }
  return s;
}

MetricResult soft_binned_ece(const BinaryView& view, std::size_t bins, double tau, double p,
                             SoftBinKind kind) {
  check_p(p);
  const auto u = soft_membership(view, bins, tau, kind);
  std::vector<double> s(bins, 0.0), sc(bins, 0.0), sy(bins, 0.0);
  for (std::size_t i = 0; i < view.size(); ++i) {
    for (std::size_t b = 0; b < bins; ++b) {
      const double w = u[i * bins + b];
      s[b] += w;
      sc[b] += w * view.c[i];
      sy[b] += w * view.y[i];
    }
  }
  const double n = static_cast<double>(view.size());
  double acc = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    if (!(s[b] > 0.0)) continue;
    const double d = std::abs(sy[b] / s[b] - sc[b] / s[b]);
    acc = std::isinf(p) ? std::max(acc, d) : acc + s[b] / n * std::pow(d, p);
  }
  if (!std::isinf(p)) acc = std::pow(acc, 1.0 / p);
  auto r = make_result(kind == SoftBinKind::kSbece ? "sbece" : "dece", acc, {0.0, 1.0});
  r.details["tau"] = tau;
  r.details["p"] = p;
  return r;
}

double dpe_from_bins(const BinaryView& view, const BinSummary& bins) {
  double v = 0.0;
  for (const Bin& b : bins) {
    if (b.count == 0) continue;
    double sq = 0.0;
    for (std::size_t i : b.members) sq += (view.y[i] - view.c[i]) * (view.y[i] - view.c[i]);
    const double nb = static_cast<double>(b.count);
    v += b.mass * (gap(b) * gap(b) - sq / (nb * nb));
  }
  return v;
}

MetricResult debiased_ce(const BinaryView& view, const BinningSpec& spec, DebiasKind kind,
                         const DebiasOptions& opts) {
  const BinSummary bins = apply_binning(view, spec);
  switch (kind) {
    case DebiasKind::kCe2Db: {
      double v = 0.0;
      for (const Bin& b : bins) {
        if (b.count == 0) continue;
        if (b.count < 2) throw Error(ErrorCode::kSingletonBin, "bin with a single point");
        const double var = b.mean_conf * (1.0 - b.mean_conf);
        v += b.mass * (gap(b) * gap(b) - var / static_cast<double>(b.count - 1));
      }
      auto r = make_result("ce2_db", v, {-1.0, 1.0});
      r.details["plugin"] = binned_gap(bins, 2.0) * binned_gap(bins, 2.0);
      return r;
    }
    case DebiasKind::kEceDb: {
      if (opts.mc_runs < 1) throw Error(ErrorCode::kInvalidArgument, "mc_runs must be >= 1");
      const double plugin = binned_gap(bins, 1.0);
      Rng rng(opts.seed);
      double acc = 0.0;
      for (std::size_t m = 0; m < opts.mc_runs; ++m) {
        for (const Bin& b : bins) {
          if (b.count == 0) continue;
          const double sd = std::sqrt(b.mean_outcome * (1.0 - b.mean_outcome) /
                                      static_cast<double>(b.count));
          const double draw = b.mean_outcome + sd * rng.normal();
          acc += b.mass * std::abs(draw - b.mean_conf);
        }
      }
      const double expected = acc / static_cast<double>(opts.mc_runs);
      auto r = make_result("ece_db", plugin - (expected - plugin), {-1.0, 1.0});
      r.details["plugin"] = plugin;
      r.details["mc_runs"] = static_cast<double>(opts.mc_runs);
      return r;
    }
    case DebiasKind::kDpe: {
      auto r = make_result("dpe", dpe_from_bins(view, bins), {-1.0, 1.0});
      r.details["plugin"] = binned_gap(bins, 2.0) * binned_gap(bins, 2.0);
      return r;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown de-bias kind");
}

MetricResult piece(const BinaryView& view, const FeatureMatrix& features, std::size_t bins,
                   std::size_t proximity_bins) {
  const BinSummary grid = bin_proximity_grid(view, features, bins, proximity_bins);
  auto r = make_result("piece", binned_gap(grid, 1.0), {0.0, 1.0});
  r.details["bins"] = static_cast<double>(bins);
  r.details["proximity_bins"] = static_cast<double>(proximity_bins);
  return r;
}

MetricResult pce(const BinaryView& view, const std::vector<Partition>& partitions,
                 PceLoss loss) {
  if (partitions.empty()) throw Error(ErrorCode::kIncompletePartition, "no partitions");
  double wsum = 0.0;
  for (const auto& q : partitions) {
    if (q.group.size() != view.size()) {
      throw Error(ErrorCode::kIncompletePartition, "partition does not cover every point");
    }
    if (q.weight < 0.0) throw Error(ErrorCode::kInvalidArgument, "negative partition weight");
    wsum += q.weight;
  }
  if (!(wsum > 0.0)) throw Error(ErrorCode::kInvalidArgument, "partition weights sum to 0");
  const double n = static_cast<double>(view.size());
  double total = 0.0;
  for (const auto& q : partitions) {
    std::map<int, std::array<double, 3>> groups;  // count, sum y, sum c
    for (std::size_t i = 0; i < view.size(); ++i) {
      auto& g = groups[q.group[i]];
      g[0] += 1.0;
      g[1] += view.y[i];
      g[2] += view.c[i];
    }
    double part = 0.0;
    for (const auto& [id, g] : groups) {
      const double d = g[1] / g[0] - g[2] / g[0];
      part += g[0] / n * (loss == PceLoss::kAbs ? std::abs(d) : d * d);
    }
    total += q.weight / wsum * part;
  }
  return make_result("pce", total, {0.0, 1.0});
}

MetricResult hl_statistic(const BinaryView& view, const BinningSpec& spec,
                          const HlOptions& opts) {
  const BinSummary bins = apply_binning(view, spec);
  double hl = 0.0;
  std::size_t occupied = 0;
  for (const Bin& b : bins) {
    if (b.count == 0) continue;
    if (!(b.mean_conf > 0.0 && b.mean_conf < 1.0)) {
      throw Error(ErrorCode::kDegenerateBinConfidence, "bin mean confidence at 0 or 1");
    }
    const double d = b.mean_outcome - b.mean_conf;
    hl += static_cast<double>(b.count) * d * d / (b.mean_conf * (1.0 - b.mean_conf));
    ++occupied;
  }
  if (occupied < 2) throw Error(ErrorCode::kTooFewBins, "HL needs at least two occupied bins");
  const double dof = opts.dof.value_or(static_cast<double>(occupied) - 2.0);
  auto r = make_result("hosmer_lemeshow", hl, {0.0, kInf});
  r.details["dof"] = dof;
  r.details["bins"] = static_cast<double>(occupied);
  if (dof > 0.0) r.p_value = chi_squared_sf(hl, dof);
  return r;
}

std::vector<std::size_t> tcal_ladder(std::size_t n) {
  const double top = std::ceil(std::log2(std::sqrt(static_cast<double>(std::max<std::size_t>(n, 1)))));
  std::vector<std::size_t> ladder;
  for (std::size_t b = 2; static_cast<double>(b) <= std::pow(2.0, std::max(top, 1.0)); b *= 2) {
    ladder.push_back(b);
  }
  return ladder;
}

MetricResult tcal(const BinaryView& view, const TcalOptions& opts) {
  if (view.size() < 2) throw Error(ErrorCode::kTooFewPoints, "T-Cal needs at least 2 points");
  if (opts.mc_runs < 1) throw Error(ErrorCode::kInvalidArgument, "mc_runs must be >= 1");
  const auto ladder = tcal_ladder(view.size());
  std::vector<double> observed;
  for (std::size_t b : ladder) observed.push_back(dpe_from_bins(view, bin_equal_width(view, b)));
  std::vector<std::size_t> exceed(ladder.size(), 0);
  BinaryView boot;
  boot.y.resize(view.size());
  boot.c.resize(view.size());
  for (std::size_t m = 0; m < opts.mc_runs; ++m) {
    Rng rng(derive_seed(opts.seed, m));
    for (std::size_t i = 0; i < view.size(); ++i) {
      boot.c[i] = view.c[rng.index(view.size())];
      boot.y[i] = rng.bernoulli(boot.c[i]) ? 1.0 : 0.0;
    }
    for (std::size_t j = 0; j < ladder.size(); ++j) {
      if (dpe_from_bins(boot, bin_equal_width(boot, ladder[j])) >= observed[j]) ++exceed[j];
    }
  }
  const double denom = static_cast<double>(opts.mc_runs + 1);
  double pmin = 1.0;
  std::size_t best = 0;
  MetricResult r;
  std::map<std::string, double> details;
  for (std::size_t j = 0; j < ladder.size(); ++j) {
    const double p = static_cast<double>(exceed[j] + 1) / denom;
    details["dpe_" + std::to_string(ladder[j])] = observed[j];
    details["p_" + std::to_string(ladder[j])] = p;
    if (p < pmin) {
      pmin = p;
      best = j;
    }
  }
  r = make_result("tcal_dpe", observed[best], {-1.0, 1.0});
  r.details = std::move(details);
  r.p_value = std::min(1.0, pmin * static_cast<double>(ladder.size()));
  r.details["selected_bins"] = static_cast<double>(ladder[best]);
  r.details["rejected"] = *r.p_value <= opts.alpha ? 1.0 : 0.0;
  return r;
}

int sice_max_level(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be in (0,1)");
  return static_cast<int>(std::floor(-std::log2(eps / 2.0)));
}

double rice(const BinaryView& view, int k, std::size_t mc_runs, std::uint64_t seed) {
  if (mc_runs < 1) throw Error(ErrorCode::kInvalidArgument, "mc_runs must be >= 1");
  const double w = std::ldexp(1.0, -k);
  const double n = static_cast<double>(view.size());
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
  double total = 0.0;
  std::vector<double> cnt, sy, sc;
  for (std::size_t m = 0; m < mc_runs; ++m) {
    const double r = rng.uniform(0.0, w);
    const std::size_t nb = 3 + static_cast<std::size_t>((1.0 - r) / w);
    cnt.assign(nb, 0.0);
    sy.assign(nb, 0.0);
    sc.assign(nb, 0.0);
    for (std::size_t i = 0; i < view.size(); ++i) {
      const double c = view.c[i];
      const std::size_t b = c < r ? 0 : 1 + static_cast<std::size_t>(std::floor((c - r) / w));
      cnt[b] += 1.0;
      sy[b] += view.y[i];
      sc[b] += c;
    }
    double run = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      if (cnt[b] > 0.0) run += cnt[b] / n * std::abs(sy[b] / cnt[b] - sc[b] / cnt[b]);
    }
    total += run;
  }
  return total / static_cast<double>(mc_runs);
}

MetricResult sice(const BinaryView& view, double eps, std::size_t mc_runs,
                  std::uint64_t seed) {
  const int kmax = sice_max_level(eps);
  double best = kInf;
  int best_k = 0;
  for (int k = 0; k <= kmax; ++k) {
    const double v = rice(view, k, mc_runs, seed) + std::ldexp(1.0, -k);
    if (v < best) {
      best = v;
      best_k = k;
    }
  }
  auto r = make_result("sice", best, {0.0, 2.0});
  r.details["k"] = best_k;
  r.details["k_max"] = kmax;
  return r;
}

MetricResult ece_fott(const MapFn& map, const BinaryView& view, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be > 0");
  double total = 0.0;
  for (double c : view.c) total += std::pow(std::abs(map(c) - c), alpha);
  auto r = make_result("ece_fott", total / static_cast<double>(view.size()), {0.0, 1.0});
  r.details["alpha"] = alpha;
  return r;
}

MapFn tilted_roof_map(const BinaryView& view, std::size_t bins) {
  const BinSummary summary = bin_equal_width(view, bins);
  std::vector<double> shift(bins, 0.0);
  for (std::size_t b = 0; b < bins; ++b) {
    if (summary[b].count > 0) shift[b] = summary[b].mean_outcome - summary[b].mean_conf;
  }
  return [shift, bins](double c) {
    const auto b = std::min(bins - 1, static_cast<std::size_t>(std::floor(c * static_cast<double>(bins))));
    return std::clamp(c + shift[b], 0.0, 1.0);
  };
}

std::size_t cv_bin_count(const BinaryView& view, std::size_t lo, std::size_t hi,
                         std::size_t folds, std::uint64_t seed) {
  if (lo < 1 || hi < lo) throw Error(ErrorCode::kInvalidArgument, "bad bin-count range");
  if (folds < 2 || folds > view.size()) throw Error(ErrorCode::kInvalidArgument, "bad fold count");
  std::vector<std::size_t> perm(view.size());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  std::vector<std::size_t> fold_of(view.size());
  for (std::size_t j = 0; j < perm.size(); ++j) fold_of[perm[j]] = j % folds;
  std::vector<BinaryView> train(folds), test(folds);
  for (std::size_t i = 0; i < view.size(); ++i) {
    for (std::size_t f = 0; f < folds; ++f) {
      BinaryView& dst = fold_of[i] == f ? test[f] : train[f];
      dst.y.push_back(view.y[i]);
      dst.c.push_back(view.c[i]);
    }
  }
  std::size_t best_b = lo;
  double best = kInf;
  for (std::size_t b = lo; b <= hi; ++b) {
    double err = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
      const MapFn map = tilted_roof_map(train[f], b);
      for (std::size_t i = 0; i < test[f].size(); ++i) {
        const double d = map(test[f].c[i]) - test[f].y[i];
        err += d * d;
      }
    }
    if (err < best) {
      best = err;
      best_b = b;
    }
  }
  return best_b;
}

MetricResult overlapping_ce(const BinaryView& view, OverlapKind kind, std::size_t size) {
  const std::size_t n = view.size();
  const auto order = confidence_order(view);
  std::vector<double> c(n), py(n + 1, 0.0), pc(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    c[j] = view.c[order[j]];
    py[j + 1] = py[j] + view.y[order[j]];
    pc[j + 1] = pc[j] + c[j];
  }
  if (kind == OverlapKind::kCalBin) {
    const std::size_t s = size == 0 ? std::max<std::size_t>(1, n / 10) : size;
    if (s > n) throw Error(ErrorCode::kWindowTooLarge, "window exceeds the point count");
    const std::size_t windows = n - s + 1;
    double total = 0.0;
    for (std::size_t b = 0; b < windows; ++b) {
      const double ybar = (py[b + s] - py[b]) / static_cast<double>(s);
      // Sorted window: split at ybar and sum |ybar - c| from prefix sums.
      const auto mid = static_cast<std::size_t>(
          std::lower_bound(c.begin() + static_cast<long>(b), c.begin() + static_cast<long>(b + s), ybar) -
          c.begin());
      const double below = ybar * static_cast<double>(mid - b) - (pc[mid] - pc[b]);
      const double above = (pc[b + s] - pc[mid]) - ybar * static_cast<double>(b + s - mid);
      total += (below + above) / static_cast<double>(s);
    }
    auto r = make_result("calbin", total / static_cast<double>(windows), {0.0, 1.0});
    r.details["window"] = static_cast<double>(s);
    return r;
  }
  const std::size_t k = size;
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "neighbour count must be >= 1");
  if (k >= n) throw Error(ErrorCode::kWindowTooLarge, "neighbour count must be below N");
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t left = j, right = j;
    for (std::size_t step = 0; step < k; ++step) {
      if (left == 0) {
        ++right;
      } else if (right + 1 == n) {
        --left;
      } else if (c[j] - c[left - 1] <= c[right + 1] - c[j]) {
        --left;
      } else {
        ++right;
      }
    }
    const double m = static_cast<double>(k + 1);
    total += std::abs((py[right + 1] - py[left]) / m - (pc[right + 1] - pc[left]) / m);
  }
  auto r = make_result("ece_knn", total / static_cast<double>(n), {0.0, 1.0});
  r.details["k"] = static_cast<double>(k);
  return r;
}

MetricResult hcs(const Dataset& ds, const BinningSpec& spec, double beta) {
  const double a = accuracy(ds);
  const double e = binned_ce(top_label_view(ds), spec, 1.0).value;
  const double den = beta * a + (1.0 - e);
  if (!(den > 0.0)) throw Error(ErrorCode::kDegenerateDenominator, "HCS denominator is zero");
  auto r = make_result("hcs", (1.0 + beta) * a * (1.0 - e) / den, {0.0, 1.0},
                       Orientation::kOneIsPerfect);
  r.details["accuracy"] = a;
  r.details["ece"] = e;
  return r;
}

MetricResult wcr(const Dataset& ds) {
  const std::size_t k = ds.k();
  std::vector<double> cf(k * k, 0.0), cr(k * k, 0.0), size(k, 0.0);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const std::size_t t = argmax(ds.row(i));
    size[t] += 1.0;
    for (std::size_t j = 0; j < k; ++j) {
      cf[t * k + j] += ds.prob(i, j);
      if (static_cast<std::size_t>(ds.label(i)) == j) cr[t * k + j] += 1.0;
    }
  }
  double total = 0.0;
  std::size_t nonempty = 0;
  for (std::size_t t = 0; t < k; ++t) {
    if (size[t] == 0.0) continue;
    ++nonempty;
    for (std::size_t j = 0; j < k; ++j) {
      total += std::abs(cf[t * k + j] / size[t] - cr[t * k + j] / size[t]);
    }
  }
  const double v = 1.0 - total / (static_cast<double>(k) * static_cast<double>(nonempty));
  auto r = make_result("wcr", v, {0.0, 1.0}, Orientation::kOneIsPerfect);
  r.details["nonempty_partitions"] = static_cast<double>(nonempty);
  return r;
}

MetricResult cal_measure(const Dataset& ds) {
  const double w = wcr(ds).value;
  const double bs = brier(ds).value;
  auto r = make_result("cal", std::sqrt((1.0 - std::sqrt(bs)) * w), {0.0, 1.0},
                       Orientation::kOneIsPerfect);
  r.details["wcr"] = w;
  r.details["brier"] = bs;
  return r;
}

}  // namespace calmet

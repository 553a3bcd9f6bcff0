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

#include "calmet/point.h"

#include <algorithm>
#include <cmath>

#include "calmet/stats.h"

namespace calmet {

namespace {

double apply_clamp(double c, const Clamp& clamp) {
  if (!clamp) return c;
  return std::clamp(c, *clamp, 1.0 - *clamp);
}

// y ln c + (1 - y) ln(1 - c) with 0 * ln 0 treated as 0.
double binary_log_lik(double y, double c) {
  double s = 0.0;
  if (y > 0.0) s += y * std::log(c);
  if (y < 1.0) s += (1.0 - y) * std::log1p(-c);
  return s;
}

void require_interior(const BinaryView& view, const Clamp& clamp, const char* what) {
  if (clamp) return;
  for (double c : view.c) {
    if (c <= 0.0 || c >= 1.0) {
      throw Error(ErrorCode::kBoundaryConfidence,
                  std::string(what) + " needs confidences strictly inside (0, 1)");
    }
  }
}

BinaryView binary_or_top(const Dataset& ds) {
  return ds.k() == 2 ? native_binary_view(ds) : top_label_view(ds);
}

// Largest and second-largest entries of a row.
std::pair<double, double> top_two(std::span<const double> row) {
  double first = -1.0, second = 0.0;
  for (double v : row) {
    if (v > first) {
      second = std::max(first, 0.0);
      first = v;
    } else if (v > second) {
      second = v;
    }
  }
  return {first, second};
}

double max_excluding(std::span<const double> row, std::size_t skip) {
  double m = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (k != skip) m = std::max(m, row[k]);
  }
  return m;
}

}  // namespace

MetricResult brier(const Dataset& ds) {
  double total = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto row = ds.row(i);
    for (std::size_t k = 0; k < ds.k(); ++k) {
      const double y = static_cast<std::size_t>(ds.label(i)) == k ? 1.0 : 0.0;
      total += (row[k] - y) * (row[k] - y);
    }
  }
  const double n = static_cast<double>(ds.n());
  auto r = make_result("brier", total / (n * static_cast<double>(ds.k())), {0.0, 1.0});
  r.details["classical"] = total / n;
  return r;
}

MetricResult rbs(const Dataset& ds) {
  return make_result("rbs", std::sqrt(brier(ds).value), {0.0, 1.0});
}

MetricResult nll(const BinaryView& view, Clamp clamp) {
  double total = 0.0;
  for (std::size_t i = 0; i < view.size(); ++i) {
    total -= binary_log_lik(view.y[i], apply_clamp(view.c[i], clamp));
  }
  const double v = total / static_cast<double>(view.size());
  auto r = make_result("nll", v, {0.0, kInf});
  r.details["infinite"] = std::isinf(v) ? 1.0 : 0.0;
  return r;
}

MetricResult nll(const Dataset& ds, bool multiclass, Clamp clamp) {
  if (!multiclass) return nll(binary_or_top(ds), clamp);
  double total = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    total -= std::log(apply_clamp(ds.prob(i, static_cast<std::size_t>(ds.label(i))), clamp));
  }
  const double v = total / static_cast<double>(ds.n() * ds.k());
  auto r = make_result("nll_multiclass", v, {0.0, kInf});
  r.details["infinite"] = std::isinf(v) ? 1.0 : 0.0;
  return r;
}

MetricResult focal_loss(const Dataset& ds, const FocalOptions& opts) {
  if (opts.gamma < 0.0) throw Error(ErrorCode::kInvalidArgument, "gamma must be >= 0");
  const bool dual = opts.variant == FocalVariant::kDual;
  double total = 0.0;
  if (opts.full_class) {
    for (std::size_t i = 0; i < ds.n(); ++i) {
      const auto row = ds.row(i);
      const auto y = static_cast<std::size_t>(ds.label(i));
      const double c = apply_clamp(row[y], opts.clamp);
      double base = 1.0 - c;
      if (dual) base += max_excluding(row, y);
      total -= std::pow(base, opts.gamma) * std::log(c);
    }
    total /= static_cast<double>(ds.n() * ds.k());
  } else {
    const BinaryView view = top_label_view(ds);
    for (std::size_t i = 0; i < view.size(); ++i) {
      const double c = apply_clamp(view.c[i], opts.clamp);
      if (view.y[i] > 0.5) {
        double base = 1.0 - c;
        if (dual) base += top_two(ds.row(i)).second;
        total -= std::pow(base, opts.gamma) * std::log(c);
      } else {
        total -= std::pow(c, opts.gamma) * std::log1p(-c);
      }
    }
    total /= static_cast<double>(view.size());
  }
  const char* name = opts.variant == FocalVariant::kDual  ? "dual_focal_loss"
                     : opts.variant == FocalVariant::kFcl ? "focal_calibration_loss"
                                                          : "focal_loss";
  if (opts.variant == FocalVariant::kFcl) total += opts.fcl_lambda * brier(ds).value;
  auto r = make_result(name, total, {0.0, kInf});
  r.details["gamma"] = opts.gamma;
  return r;
}

MetricResult ecd(const BinaryView& view, Clamp clamp) {
  require_interior(view, clamp, "ECD");
  double total = 0.0;
  for (std::size_t i = 0; i < view.size(); ++i) {
    const double c = apply_clamp(view.c[i], clamp);
    total += (c - view.y[i]) * std::log(c / (1.0 - c));
  }
  return make_result("ecd", total / static_cast<double>(view.size()), {-kInf, kInf},
                     Orientation::kSignedZeroPerfect);
}

MetricResult global_bias(const BinaryView& view, GlobalBiasKind kind) {
  double sc = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < view.size(); ++i) {
    sc += view.c[i];
    sy += view.y[i];
  }
  const double n = static_cast<double>(view.size());
  switch (kind) {
    case GlobalBiasKind::kGsb:
      return make_result("gsb", (sc / n - sy / n) * (sc / n - sy / n), {0.0, 1.0});
    case GlobalBiasKind::kMdca:
      return make_result("mdca", std::abs(sc / n - sy / n), {0.0, 1.0});
    case GlobalBiasKind::kEo:
      if (sy == 0.0) throw Error(ErrorCode::kZeroDenominator, "EO needs at least one positive");
      return make_result("eo", sc / sy, {0.0, kInf}, Orientation::kOneIsPerfect);
    case GlobalBiasKind::kOe:
      if (sc == 0.0) throw Error(ErrorCode::kZeroDenominator, "OE needs nonzero confidence mass");
      return make_result("oe", sy / sc, {0.0, kInf}, Orientation::kOneIsPerfect);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown global bias kind");
}

MetricResult global_bias(const Dataset& ds, GlobalBiasKind kind) {
  if (kind == GlobalBiasKind::kEo || kind == GlobalBiasKind::kOe) {
    return global_bias(binary_or_top(ds), kind);
  }
  double total = 0.0;
  for (std::size_t k = 0; k < ds.k(); ++k) total += global_bias(ovr_view(ds, k), kind).value;
  return make_result(kind == GlobalBiasKind::kGsb ? "gsb" : "mdca",
                     total / static_cast<double>(ds.k()), {0.0, 1.0});
}

MetricResult success_rate(const Dataset& ds) {
  double total = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto row = ds.row(i);
    const double top = *std::max_element(row.begin(), row.end());
    const auto ties = std::count(row.begin(), row.end(), top);
    if (row[static_cast<std::size_t>(ds.label(i))] == top) {
      total += 1.0 / static_cast<double>(ties);
    }
  }
  return make_result("success_rate", total / static_cast<double>(ds.n()), {0.0, 1.0},
                     Orientation::kOneIsPerfect);
}

MetricResult normalized_square(const BinaryView& view, NormalizedSquareKind kind,
                               Clamp clamp) {
  require_interior(view, clamp, "DSS/NSES");
  double total = 0.0;
  for (std::size_t i = 0; i < view.size(); ++i) {
    const double c = apply_clamp(view.c[i], clamp);
    const double var = c * (1.0 - c);
    total += (view.y[i] - c) * (view.y[i] - c) / var;
    if (kind == NormalizedSquareKind::kDss) total += std::log(var);  // 2 ln sigma
  }
  const double v = total / static_cast<double>(view.size());
  if (kind == NormalizedSquareKind::kDss) return make_result("dss", v, {-kInf, kInf});
  return make_result("nses", v, {0.0, kInf}, Orientation::kOneIsPerfect);
}

MetricResult pnorm_error(const BinaryView& view, double p) {
  if (!(p >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "p must be >= 1");
  double acc = 0.0;
  for (std::size_t i = 0; i < view.size(); ++i) {
    const double d = std::abs(view.y[i] - view.c[i]);
    acc = std::isinf(p) ? std::max(acc, d) : acc + std::pow(d, p);
  }
  double v = acc;
  if (!std::isinf(p)) v = std::pow(acc / static_cast<double>(view.size()), 1.0 / p);
  auto r = make_result(std::isinf(p) ? "pwe_inf" : (p == 1.0 ? "mae" : "pwe"), v, {0.0, 1.0});
  r.details["p"] = p;
  return r;
}

MetricResult l1eps(const BinaryView& view, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be > 0");
  double total = 0.0;
  for (std::size_t i = 0; i < view.size(); ++i) {
    const double d = view.y[i] - view.c[i];
    total += std::sqrt(d * d + eps);
  }
  return make_result("l1eps", total / static_cast<double>(view.size()),
                     {std::sqrt(eps), std::sqrt(1.0 + eps)});
}

MetricResult hinge(const BinaryView& view) {
  double total = 0.0;
  for (std::size_t i = 0; i < view.size(); ++i) {
    total += 1.0 - (2.0 * view.y[i] - 1.0) * view.c[i];
  }
  // The literal mean of 1 - (2y - 1)c exceeds 1 for negatives; the l1 value
  // is reported and the literal one kept for reference.
  auto r = pnorm_error(view, 1.0);
  r.details["literal"] = total / static_cast<double>(view.size());
  r.name = "hinge";
  return r;
}

MetricResult spiegelhalter_z(const BinaryView& view) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < view.size(); ++i) {
    const double c = view.c[i];
    const double w = 1.0 - 2.0 * c;
    num += (view.y[i] - c) * w;
    den += w * w * c * (1.0 - c);
  }
  if (!(den > 0.0)) {
    throw Error(ErrorCode::kDegenerateDenominator, "Spiegelhalter variance is zero");
  }
  const double z = num / std::sqrt(den);
  auto r = make_result("spiegelhalter_z", z, {-kInf, kInf}, Orientation::kSignedZeroPerfect);
  r.p_value = std::min(1.0, 2.0 * normal_sf(std::abs(z)));
  return r;
}

MetricResult alpha_score(const Dataset& ds, double alpha, AlphaKind kind, bool corrected) {
  if (!(alpha > 1.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be > 1");
  double total = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto row = ds.row(i);
    const double cy = row[static_cast<std::size_t>(ds.label(i))];
    double sum_pow = 0.0;
    for (double c : row) sum_pow += std::pow(c, alpha);
    if (kind == AlphaKind::kPseudoSpherical) {
      const double norm = std::pow(sum_pow, 1.0 / alpha);
      total += std::pow(cy, alpha - 1.0) / std::pow(norm, alpha - 1.0);
    } else {
      double s = (alpha - 1.0) * sum_pow - alpha * cy;
      if (corrected) s = (s + 1.0) / static_cast<double>(ds.k());
      total += s;
    }
  }
  const double v = total / static_cast<double>(ds.n());
  MetricResult r;
  if (kind == AlphaKind::kPseudoSpherical) {
    r = make_result("pss", v, {0.0, kInf}, Orientation::kOneIsPerfect);
  } else if (corrected) {
    r = make_result("power_score", v, {0.0, 1.0});
  } else {
    r = make_result("power_score", v, {-kInf, kInf});
  }
  r.details["alpha"] = alpha;
  if (kind == AlphaKind::kPower) r.details["corrected"] = corrected ? 1.0 : 0.0;
  return r;
}

MetricResult soft_f1(const BinaryView& view) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < view.size(); ++i) {
    num += (1.0 - view.c[i]) * (1.0 - view.y[i]);
    den += 2.0 - view.c[i] - view.y[i];
  }
  if (!(den > 0.0)) throw Error(ErrorCode::kDegenerateDenominator, "soft F1 is 0/0");
  return make_result("soft_f1", 2.0 * num / den, {0.0, 1.0}, Orientation::kOneIsPerfect);
}

MetricResult rps(const Dataset& ds, RpsKind kind) {
  double total = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto row = ds.row(i);
    const auto y = static_cast<std::size_t>(ds.label(i));
    double cum = 0.0, point = 0.0;
    for (std::size_t k = 0; k + 1 < ds.k(); ++k) {
      cum += (k == y ? 1.0 : 0.0) - row[k];
      point += kind == RpsKind::kRps ? cum * cum : std::abs(cum);
    }
    total += kind == RpsKind::kRps ? point : point * point;
  }
  return make_result(kind == RpsKind::kRps ? "rps" : "sarps",
                     total / static_cast<double>(ds.n() * (ds.k() - 1)), {0.0, 1.0});
}

}  // namespace calmet

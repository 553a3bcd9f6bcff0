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

#include "calmet/kernelcurve.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>

#include "calmet/binned.h"
#include "calmet/fit.h"
#include "calmet/stats.h"

namespace calmet {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;
constexpr double kLogitClamp = 1e-6;

double gauss(double u) { return kInvSqrt2Pi * std::exp(-0.5 * u * u); }

double clamp_unit(double c, double eps) { return std::clamp(c, eps, 1.0 - eps); }

double log_beta_pdf(double x, double a, double b) {
  x = clamp_unit(x, kLogitClamp);
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * std::log(x) +
         (b - 1.0) * std::log1p(-x);
}

BinaryView binary_or_top(const Dataset& ds) {
  return ds.k() == 2 ? native_binary_view(ds) : top_label_view(ds);
}

void require_nonempty(const BinaryView& view) {
  if (view.size() == 0) throw Error(ErrorCode::kTooFewPoints, "empty input");
}

}  // namespace

const char* KernelFamilyName(KernelFamily f) {
  switch (f) {
    case KernelFamily::kGaussian: return "gaussian";
    case KernelFamily::kReflectedGaussian: return "reflected-gaussian";
    case KernelFamily::kLaplace: return "laplace";
    case KernelFamily::kEpanechnikov: return "epanechnikov";
    case KernelFamily::kTriweight: return "triweight";
    case KernelFamily::kBeta: return "beta";
    case KernelFamily::kDirichlet: return "dirichlet";
  }
  return "unknown";
}

double kernel_weight(KernelFamily family, double c, double center, double h) {
  const double u = (c - center) / h;
  switch (family) {
    case KernelFamily::kGaussian:
      return gauss(u) / h;
    case KernelFamily::kReflectedGaussian: {
      // Images of the centre under reflection at 0 and 1 (period 2).
      const int span = 1 + static_cast<int>(std::ceil(4.0 * h));
      double s = 0.0;
      for (int m = -span; m <= span; ++m) {
        s += gauss((c - center - 2.0 * m) / h) + gauss((c + center - 2.0 * m) / h);
      }
      return s / h;
    }
    case KernelFamily::kLaplace:
      return std::exp(-std::abs(u)) / (2.0 * h);
    case KernelFamily::kEpanechnikov:
      return std::abs(u) < 1.0 ? 0.75 * (1.0 - u * u) / h : 0.0;
    case KernelFamily::kTriweight: {
      if (std::abs(u) >= 1.0) return 0.0;
      const double t = 1.0 - u * u;
      return 35.0 / 32.0 * t * t * t / h;
    }
    case KernelFamily::kBeta:
    case KernelFamily::kDirichlet:
      return std::exp(log_beta_pdf(c, center / h + 1.0, (1.0 - center) / h + 1.0));
  }
  return 0.0;
}

double rule_of_thumb_bandwidth(const std::vector<double>& x) {
  if (x.size() < 2) throw Error(ErrorCode::kTooFewPoints, "bandwidth needs 2 points");
  return 1.06 * stddev(x) * std::pow(static_cast<double>(x.size()), -0.2);
}

double median_heuristic_bandwidth(const std::vector<double>& x, std::uint64_t seed) {
  if (x.size() < 2) throw Error(ErrorCode::kTooFewPoints, "bandwidth needs 2 points");
  std::vector<double> s = x;
  if (s.size() > 10000) {
    Rng rng(seed);
    std::shuffle(s.begin(), s.end(), rng.engine());
    s.resize(10000);
  }
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  const std::size_t pairs = n * (n - 1) / 2;
  // Number of pairs at distance <= d, by a two-pointer sweep.
  auto count_le = [&](double d) {
    std::size_t cnt = 0, lo = 0;
    for (std::size_t j = 0; j < n; ++j) {
      while (s[j] - s[lo] > d) ++lo;
      cnt += j - lo;
    }
    return cnt;
  };
  // Smallest pairwise distance whose rank reaches k (1-based).
  auto kth = [&](std::size_t k) {
    double lo = 0.0, hi = s.back() - s.front();
    if (count_le(lo) >= k) return lo;
    for (int it = 0; it < 200 && hi > lo; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (count_le(mid) >= k ? hi : lo) = mid;
    }
    return hi;
  };
  if (pairs % 2 == 1) return kth(pairs / 2 + 1);
  return 0.5 * (kth(pairs / 2) + kth(pairs / 2 + 1));
}

namespace {

double kernel_map_at(const std::vector<double>& ys, const std::vector<double>& cs,
                     KernelFamily family, double h, double at) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const double w = kernel_weight(family, at, cs[i], h);
    num += w * ys[i];
    den += w;
  }
  if (den > 0.0 && std::isfinite(den)) return num / den;
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < cs.size(); ++i) {
    if (std::abs(cs[i] - at) < std::abs(cs[nearest] - at)) nearest = i;
  }
  return ys[nearest];
}

}  // namespace

double resolve_bandwidth(const BinaryView& view, const KernelSpec& spec) {
  switch (spec.rule) {
    case BandwidthRule::kFixed:
      if (!(spec.bandwidth > 0.0)) throw Error(ErrorCode::kInvalidArgument, "bandwidth must be > 0");
      return spec.bandwidth;
    case BandwidthRule::kRuleOfThumb:
      return std::max(rule_of_thumb_bandwidth(view.c), 1e-6);
    case BandwidthRule::kMedianHeuristic:
      return std::max(median_heuristic_bandwidth(view.c, spec.seed), 1e-6);
    case BandwidthRule::kCrossValidation: {
      constexpr std::size_t kFolds = 5;
      if (view.size() < kFolds) throw Error(ErrorCode::kTooFewPoints, "CV needs 5 points");
      const double candidates[] = {0.005, 0.01, 0.02, 0.04, 0.08, 0.16, 0.32};
      std::vector<std::size_t> perm(view.size());
      std::iota(perm.begin(), perm.end(), 0);
      Rng rng(spec.seed);
      std::shuffle(perm.begin(), perm.end(), rng.engine());
      double best = kInf, best_h = candidates[0];
      for (double h : candidates) {
        double err = 0.0;
        for (std::size_t f = 0; f < kFolds; ++f) {
          std::vector<double> ty, tc;
          for (std::size_t j = 0; j < perm.size(); ++j) {
            if (j % kFolds != f) {
              ty.push_back(view.y[perm[j]]);
              tc.push_back(view.c[perm[j]]);
            }
          }
          for (std::size_t j = f; j < perm.size(); j += kFolds) {
            const double d = kernel_map_at(ty, tc, spec.family, h, view.c[perm[j]]) -
                             view.y[perm[j]];
            err += d * d;
          }
        }
        if (err < best) {
          best = err;
          best_h = h;
        }
      }
      return best_h;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown bandwidth rule");
}

CalibrationMap kernel_calibration_map(const BinaryView& view, const KernelSpec& spec) {
  require_nonempty(view);
  const double h = resolve_bandwidth(view, spec);
  CalibrationMap map;
  map.provenance = MapProvenance::kKernel;
  map.eval = [ys = view.y, cs = view.c, family = spec.family, h](double c) {
    return kernel_map_at(ys, cs, family, h, c);
  };
  return map;
}

MetricResult kernel_curve_ce(const BinaryView& view, const KernelSpec& spec, double p) {
  if (!(p >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "p must be >= 1");
  const CalibrationMap map = kernel_calibration_map(view, spec);
  double total = 0.0;
  for (double c : view.c) total += std::pow(std::abs(map(c) - c), p);
  auto r = make_result(p == 2.0 ? "msce" : (p == 1.0 ? "sece" : "kernel_ce"),
                       total / static_cast<double>(view.size()), {0.0, 1.0});
  r.details["bandwidth"] = resolve_bandwidth(view, spec);
  r.details["p"] = p;
  return r;
}

double smece_at(const BinaryView& view, double sigma, std::size_t grid, bool fast) {
  require_nonempty(view);
  if (grid < 2) throw Error(ErrorCode::kInvalidArgument, "grid must have >= 2 points");
  const double n = static_cast<double>(view.size());
  const double g = static_cast<double>(grid);
  double total = 0.0;
  if (!fast) {
    for (std::size_t t = 1; t <= grid; ++t) {
      const double at = static_cast<double>(t) / g;
      double s = 0.0;
      for (std::size_t i = 0; i < view.size(); ++i) {
        s += (view.y[i] - view.c[i]) *
             kernel_weight(KernelFamily::kReflectedGaussian, at, view.c[i], sigma);
      }
      total += std::abs(s);
    }
    return total / (n * g);
  }
  // Residual mass split onto nodes j / G, j = 0..G, with 4-point cubic
  // weights. The reflected kernel is even about 0 and 1, so nodes -1 and
  // G + 1 fold back onto 1 and G - 1.
  std::vector<double> mass(grid + 1, 0.0);
  const long gl = static_cast<long>(grid);
  auto deposit = [&](long node, double w) {
    if (node < 0) node = -node;
    if (node > gl) node = 2 * gl - node;
    mass[static_cast<std::size_t>(node)] += w;
  };
  for (std::size_t i = 0; i < view.size(); ++i) {
    const double u = view.c[i] * g;
    const long j = std::min(gl - 1, static_cast<long>(std::floor(u)));
    const double f = u - static_cast<double>(j);
    const double r = view.y[i] - view.c[i];
    deposit(j - 1, -r * f * (f - 1.0) * (f - 2.0) / 6.0);
    deposit(j, r * (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0);
    deposit(j + 1, -r * (f + 1.0) * f * (f - 2.0) / 2.0);
    deposit(j + 2, r * (f + 1.0) * f * (f - 1.0) / 6.0);
  }
  // Periodised Gaussian at integer offsets e in [-G, 2G]; index e + G.
  const auto gi = static_cast<long>(grid);
  std::vector<double> table(static_cast<std::size_t>(3 * gi + 1));
  const int span = 1 + static_cast<int>(std::ceil(4.0 * sigma));
  for (long e = -gi; e <= 2 * gi; ++e) {
    double s = 0.0;
    for (int m = -span; m <= span; ++m) {
      s += gauss((static_cast<double>(e) / g - 2.0 * m) / sigma);
    }
    table[static_cast<std::size_t>(e + gi)] = s / sigma;
  }
  for (long t = 1; t <= gi; ++t) {
    double s = 0.0;
    for (long j = 0; j <= gi; ++j) {
      if (mass[static_cast<std::size_t>(j)] == 0.0) continue;
      s += mass[static_cast<std::size_t>(j)] *
           (table[static_cast<std::size_t>(t - j + gi)] + table[static_cast<std::size_t>(t + j + gi)]);
    }
    total += std::abs(s);
  }
  return total / (n * g);
}

MetricResult smece(const BinaryView& view, std::size_t grid) {
  require_nonempty(view);
  const double switch_at = 2.0 / static_cast<double>(grid);
  auto eval = [&](double s) { return smece_at(view, s, grid, s >= switch_at); };
  double lo = 1e-6, hi = 1.0;
  double sigma = lo;
  if (lo - eval(lo) < 0.0) {
    if (hi - eval(hi) < 0.0) throw Error(ErrorCode::kNoFixedPoint, "SMECE fixed point not bracketed");
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (mid - eval(mid) < 0.0 ? lo : hi) = mid;
    }
    sigma = hi;
  }
  const double v = eval(sigma);
  auto r = make_result("smece", v, {0.0, 1.0});
  r.details["sigma"] = sigma;
  r.details["fixed_point_residual"] = std::abs(sigma - v);
  return r;
}

MetricResult kde_ce(const Dataset& ds, KdeKind kind, double p, double bandwidth) {
  if (!(bandwidth > 0.0)) throw Error(ErrorCode::kInvalidArgument, "bandwidth must be > 0");
  if (!(p >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "p must be >= 1");
  if (ds.n() < 2) throw Error(ErrorCode::kTooFewPoints, "KDE needs at least 2 points");
  const double h = bandwidth;
  if (kind == KdeKind::kBeta) {
    const BinaryView view = binary_or_top(ds);
    const std::size_t n = view.size();
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double s1 = 0.0, s2 = 0.0, d1 = 0.0, d2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == j) continue;
        const double k = kernel_weight(KernelFamily::kBeta, view.c[j], view.c[i], h);
        s1 += k * view.y[i];
        s2 += k * k * view.y[i] * view.y[i];
        d1 += k;
        d2 += k * k;
      }
      const double c = view.c[j];
      const double den = d1 * d1 - d2;
      const double sq = den > 0.0 ? (s1 * s1 - s2) / den : (s1 / d1) * (s1 / d1);
      total += sq - 2.0 * c * s1 / d1 + c * c;
    }
    auto r = make_result("bkde", total / static_cast<double>(n), {-1.0, 1.0});
    r.details["bandwidth"] = h;
    return r;
  }
  const std::size_t n = ds.n(), kc = ds.k();
  std::vector<double> logc(n * kc);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < kc; ++k) {
      logc[i * kc + k] = std::log(std::max(ds.prob(i, k), kLogitClamp));
    }
  }
  // Normaliser of the Dirichlet centred on row i; sum of alphas is 1/h + K.
  std::vector<double> lognorm(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = std::lgamma(1.0 / h + static_cast<double>(kc));
    for (std::size_t k = 0; k < kc; ++k) s -= std::lgamma(ds.prob(i, k) / h + 1.0);
    lognorm[i] = s;
  }
  const bool debias = p == 2.0;
  double total = 0.0;
  std::vector<double> s1(kc), s2(kc);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(s1.begin(), s1.end(), 0.0);
    std::fill(s2.begin(), s2.end(), 0.0);
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      double lk = lognorm[i];
      for (std::size_t k = 0; k < kc; ++k) lk += ds.prob(i, k) / h * logc[j * kc + k];
      const double kv = std::exp(lk);
      const auto yi = static_cast<std::size_t>(ds.label(i));
      s1[yi] += kv;
      s2[yi] += kv * kv;
      d1 += kv;
      d2 += kv * kv;
    }
    const double den = d1 * d1 - d2;
    for (std::size_t k = 0; k < kc; ++k) {
      const double c = ds.prob(j, k);
      if (debias && den > 0.0) {
        total += (s1[k] * s1[k] - s2[k]) / den - 2.0 * c * s1[k] / d1 + c * c;
      } else {
        total += std::pow(std::abs(s1[k] / d1 - c), p);
      }
    }
  }
  auto r = make_result("dkde", total / static_cast<double>(n), {debias ? -1.0 : 0.0, 2.0});
  r.details["bandwidth"] = h;
  r.details["p"] = p;
  return r;
}

namespace {

double pairwise_distance(const Dataset& ds, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t k = 0; k < ds.k(); ++k) {
    const double d = ds.prob(i, k) - ds.prob(j, k);
    s += d * d;
  }
  return std::sqrt(s);
}

double residual_dot(const Dataset& ds, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t k = 0; k < ds.k(); ++k) {
    const double ri = (static_cast<std::size_t>(ds.label(i)) == k ? 1.0 : 0.0) - ds.prob(i, k);
    const double rj = (static_cast<std::size_t>(ds.label(j)) == k ? 1.0 : 0.0) - ds.prob(j, k);
    s += ri * rj;
  }
  return s;
}

double vector_median_heuristic(const Dataset& ds, std::uint64_t seed) {
  std::vector<std::size_t> idx(ds.n());
  std::iota(idx.begin(), idx.end(), 0);
  constexpr std::size_t kCap = 2000;
  if (idx.size() > kCap) {
    Rng rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng.engine());
    idx.resize(kCap);
  }
  std::vector<double> d;
  d.reserve(idx.size() * (idx.size() - 1) / 2);
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) d.push_back(pairwise_distance(ds, idx[a], idx[b]));
  }
  return median(std::move(d));
}

struct PairTerms {
  std::function<double(std::size_t, std::size_t)> h;
  std::size_t n;
};

MetricResult pairwise_from_terms(const PairTerms& t, PairwiseKind kind, double bandwidth,
                                 const std::optional<std::uint64_t>& shuffle_seed) {
  const std::size_t n = t.n;
  const double nn = static_cast<double>(n);
  MetricResult r;
  switch (kind) {
    case PairwiseKind::kMmce:
    case PairwiseKind::kLkce:
    case PairwiseKind::kSkceB: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        s += t.h(i, i);
        for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * t.h(i, j);
      }
      const char* name = kind == PairwiseKind::kMmce ? "mmce"
                         : kind == PairwiseKind::kLkce ? "lkce" : "skce_b";
      r = make_result(name, s / (nn * nn), {0.0, 1.0});
      break;
    }
    case PairwiseKind::kSkceUq: {
      if (n < 2) throw Error(ErrorCode::kTooFewPoints, "SKCE-UQ needs 2 points");
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) s += t.h(i, j);
      }
      r = make_result("skce_uq", 2.0 * s / (nn * (nn - 1.0)), {-1.0, 1.0});
      break;
    }
    case PairwiseKind::kSkceUl: {
      const std::size_t half = n / 2;
      if (half < 2) throw Error(ErrorCode::kTooFewPoints, "SKCE-UL needs 4 points");
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      if (shuffle_seed) {
        Rng rng(*shuffle_seed);
        std::shuffle(order.begin(), order.end(), rng.engine());
      }
      std::vector<double> terms(half);
      for (std::size_t i = 0; i < half; ++i) terms[i] = t.h(order[2 * i], order[2 * i + 1]);
      const double m = mean(terms);
      const double sd = stddev(terms);
      r = make_result("skce_ul", m, {-1.0, 1.0});
      // Standard error of the mean of the pair terms.
      if (sd > 0.0) {
        r.p_value = normal_sf(m / sd * std::sqrt(static_cast<double>(half)));
      } else {
        r.p_value = m > 0.0 ? 0.0 : 1.0;
      }
      r.details["pairs"] = static_cast<double>(half);
      break;
    }
  }
  r.details["bandwidth"] = bandwidth;
  return r;
}

}  // namespace

MetricResult pairwise_kernel_ce(const BinaryView& view, PairwiseKind kind,
                                const PairwiseOptions& opts) {
  require_nonempty(view);
  double h = 0.0;
  if (opts.bandwidth) {
    h = *opts.bandwidth;
  } else if (kind == PairwiseKind::kMmce) {
    h = 0.4;
  } else if (kind == PairwiseKind::kLkce) {
    h = 1.0;
  } else {
    h = view.size() > 1 ? median_heuristic_bandwidth(view.c) : 1.0;
  }
  if (!(h > 0.0)) h = 1.0;
  PairTerms t{[&view, h](std::size_t i, std::size_t j) {
                return (view.y[i] - view.c[i]) * (view.y[j] - view.c[j]) *
                       std::exp(-std::abs(view.c[i] - view.c[j]) / h);
              },
              view.size()};
  return pairwise_from_terms(t, kind, h, opts.shuffle_seed);
}

MetricResult pairwise_kernel_ce(const Dataset& ds, PairwiseKind kind,
                                const PairwiseOptions& opts) {
  if (kind == PairwiseKind::kMmce || kind == PairwiseKind::kLkce) {
    return pairwise_kernel_ce(binary_or_top(ds), kind, opts);
  }
  if (ds.n() == 0) throw Error(ErrorCode::kTooFewPoints, "empty input");
  double h = opts.bandwidth ? *opts.bandwidth
                            : (ds.n() > 1 ? vector_median_heuristic(ds, opts.shuffle_seed.value_or(0)) : 1.0);
  if (!(h > 0.0)) h = 1.0;
  PairTerms t{[&ds, h](std::size_t i, std::size_t j) {
                return residual_dot(ds, i, j) * std::exp(-pairwise_distance(ds, i, j) / h);
              },
              ds.n()};
  return pairwise_from_terms(t, kind, h, opts.shuffle_seed);
}

MetricResult skde(const BinaryView& view, std::size_t grid, double p) {
  if (view.size() < 2) throw Error(ErrorCode::kTooFewPoints, "SKDE needs at least 2 points");
  if (!(p >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "p must be >= 1");
  const double h = std::max(rule_of_thumb_bandwidth(view.c), 1e-3);
  const double n = static_cast<double>(view.size());
  const double g = static_cast<double>(grid);
  double total = 0.0;
  for (std::size_t t = 1; t <= grid; ++t) {
    const double at = static_cast<double>(t) / g;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < view.size(); ++i) {
      const double w = kernel_weight(KernelFamily::kTriweight, at, view.c[i], h);
      num += w * view.y[i];
      den += w;
    }
    if (den <= 0.0) continue;
    total += std::pow(std::abs(num / den - at), p) * den / n;
  }
  auto r = make_result("skde", total / g, {0.0, 1.0});
  r.details["bandwidth"] = h;
  r.details["p"] = p;
  return r;
}

double cluster_reliability(double sum_y, std::size_t m, double yhat) {
  if (m < 2) throw Error(ErrorCode::kTooFewPoints, "cluster needs at least 2 points");
  const double md = static_cast<double>(m);
  const double d = sum_y - md * yhat;
  return 1.0 + 1.0 / (md - 1.0) - d * d / (md * (md - 1.0) * yhat * (1.0 - yhat));
}

ReliabilityMap reliability_map(const BinaryView& view, std::size_t cluster_size) {
  if (cluster_size < 2) throw Error(ErrorCode::kInvalidArgument, "cluster size must be >= 2");
  if (view.size() < cluster_size) throw Error(ErrorCode::kTooFewPoints, "fewer points than cluster size");
  auto clip = [](double v) { return std::clamp(v, 0.001, 0.999); };
  ReliabilityMap out;
  out.calibration.provenance = MapProvenance::kKernel;
  out.calibration.eval = [xs = view.c, ys = view.y, clip](double c) {
    return clip(fit::local_linear_epanechnikov(xs, ys, c, 0.01));
  };
  // Clusters of consecutive points in confidence order; the calibration map
  // is monotone in practice, so these are also adjacent in yhat.
  const auto order = confidence_order(view);
  const std::size_t clusters = view.size() / cluster_size;
  for (std::size_t q = 0; q < clusters; ++q) {
    const std::size_t start = q * cluster_size;
    const std::size_t end = q + 1 == clusters ? view.size() : start + cluster_size;
    double sc = 0.0, sy = 0.0;
    for (std::size_t j = start; j < end; ++j) {
      sc += view.c[order[j]];
      sy += view.y[order[j]];
    }
    const double cbar = sc / static_cast<double>(end - start);
    out.cluster_conf.push_back(cbar);
    out.cluster_reliability.push_back(
        cluster_reliability(sy, end - start, out.calibration(cbar)));
  }
  out.reliability.provenance = MapProvenance::kKernel;
  out.reliability.eval = [xs = out.cluster_conf, ys = out.cluster_reliability, clip](double c) {
    return clip(fit::local_linear_epanechnikov(xs, ys, c, 0.1));
  };
  return out;
}

MetricResult smooth_ce(const BinaryView& view) {
  require_nonempty(view);
  const auto order = confidence_order(view);
  const double n = static_cast<double>(view.size());
  // Residual weight per distinct confidence.
  std::vector<double> cs, ws;
  for (std::size_t i : order) {
    const double r = (view.y[i] - view.c[i]) / n;
    if (!cs.empty() && cs.back() == view.c[i]) {
      ws.back() += r;
    } else {
      cs.push_back(view.c[i]);
      ws.push_back(r);
    }
  }
  // Concave piecewise-linear value function on [-1, 1] as breakpoints.
  std::vector<double> xs{-1.0, 1.0}, vs{-ws[0], ws[0]};
  std::vector<double> nx, nv;
  for (std::size_t u = 1; u < cs.size(); ++u) {
    const double d = cs[u] - cs[u - 1];
    const double top = *std::max_element(vs.begin(), vs.end());
    std::size_t a1 = 0;
    while (vs[a1] != top) ++a1;
    std::size_t a2 = vs.size() - 1;
    while (vs[a2] != top) --a2;
    nx.clear();
    nv.clear();
    for (std::size_t k = 0; k <= a1; ++k) {
      nx.push_back(xs[k] - d);
      nv.push_back(vs[k]);
    }
    for (std::size_t k = a2; k < xs.size(); ++k) {
      nx.push_back(xs[k] + d);
      nv.push_back(vs[k]);
    }
    // Restrict the window maximum to [-1, 1].
    xs.clear();
    vs.clear();
    std::size_t k = 0;
    while (nx[k + 1] <= -1.0) ++k;
    if (nx[k] < -1.0) {
      const double f = (-1.0 - nx[k]) / (nx[k + 1] - nx[k]);
      xs.push_back(-1.0);
      vs.push_back(nv[k] + f * (nv[k + 1] - nv[k]));
      ++k;
    }
    for (; k < nx.size() && nx[k] < 1.0; ++k) {
      xs.push_back(nx[k]);
      vs.push_back(nv[k]);
    }
    if (k < nx.size()) {
      if (nx[k] == 1.0) {
        xs.push_back(1.0);
        vs.push_back(nv[k]);
      } else {
        const double f = (1.0 - nx[k - 1]) / (nx[k] - nx[k - 1]);
        xs.push_back(1.0);
        vs.push_back(nv[k - 1] + f * (nv[k] - nv[k - 1]));
      }
    }
    for (std::size_t j = 0; j < xs.size(); ++j) vs[j] += ws[u] * xs[j];
  }
  const double v = std::max(0.0, *std::max_element(vs.begin(), vs.end()));
  auto r = make_result("smooth_ce", v, {0.0, 1.0});
  double signed_mean = 0.0;
  for (double w : ws) signed_mean += w;
  r.details["signed"] = signed_mean;
  return r;
}

MetricResult lsece(const BinaryView& view, double sigma, std::size_t samples,
                   std::uint64_t seed) {
  require_nonempty(view);
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sigma must be > 0");
  const std::size_t m = samples == 0 ? view.size() : samples;
  std::vector<double> h(view.size());
  for (std::size_t i = 0; i < view.size(); ++i) h[i] = logit(clamp_unit(view.c[i], kLogitClamp));
  Rng rng(seed);
  std::vector<double> e(view.size());
  double total = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    const std::size_t pick = rng.index(view.size());
    const double at = h[pick] + sigma * rng.normal();
    double top = -kInf;
    for (std::size_t i = 0; i < view.size(); ++i) {
      const double u = (h[i] - at) / sigma;
      e[i] = -0.5 * u * u;
      top = std::max(top, e[i]);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < view.size(); ++i) {
      const double w = std::exp(e[i] - top);
      num += w * view.y[i];
      den += w;
    }
    total += std::abs(num / den - sigmoid(at));
  }
  auto r = make_result("lsece", total / static_cast<double>(m), {0.0, 1.0});
  r.details["sigma"] = sigma;
  r.details["samples"] = static_cast<double>(m);
  return r;
}

std::vector<MetricResult> loess_metrics(const BinaryView& view) {
  if (view.size() < 10) throw Error(ErrorCode::kTooFewPoints, "LOESS needs at least 10 points");
  const auto fitted = fit::loess(view.c, view.y, 0.75, 2);
  std::vector<double> d(view.size());
  for (std::size_t i = 0; i < view.size(); ++i) d[i] = std::abs(view.c[i] - fitted[i]);
  return {make_result("ici", mean(d), {0.0, 1.0}),
          make_result("e50", quantile(d, 0.5), {0.0, 1.0}),
          make_result("e90", quantile(d, 0.9), {0.0, 1.0}),
          make_result("emax", *std::max_element(d.begin(), d.end()), {0.0, 1.0})};
}

namespace {

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& basis) {
  Eigen::MatrixXd x(basis.rows(), basis.cols() + 1);
  x.col(0).setOnes();
  x.rightCols(basis.cols()) = basis;
  return x;
}

}  // namespace

MetricResult eci(const Dataset& ds) {
  if (ds.n() < 30) throw Error(ErrorCode::kTooFewPoints, "ECI needs at least 30 points");
  const std::size_t n = ds.n();
  double total = 0.0;
  for (std::size_t k = 0; k < ds.k(); ++k) {
    std::vector<double> x(n);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    double positives = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = logit(clamp_unit(ds.prob(i, k), kLogitClamp));
      y(static_cast<Eigen::Index>(i)) = static_cast<std::size_t>(ds.label(i)) == k ? 1.0 : 0.0;
      positives += y(static_cast<Eigen::Index>(i));
    }
    std::vector<double> yhat(n, positives / static_cast<double>(n));
    if (positives > 0.0 && positives < static_cast<double>(n)) {
      std::vector<double> knots;
      for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) knots.push_back(quantile(x, q));
      knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
      Eigen::MatrixXd basis;
      if (knots.size() >= 3) {
        basis = fit::natural_spline_basis(x, knots);
      } else {
        basis = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(n));
      }
      const Eigen::MatrixXd design = with_intercept(basis);
      const auto lf = fit::logistic_irls(design, y, 1e-4);
      if (!lf.converged || !lf.coef.allFinite()) {
        throw Error(ErrorCode::kFitFailure, "ECI spline logistic fit did not converge");
      }
      const Eigen::VectorXd eta = design * lf.coef;
      for (std::size_t i = 0; i < n; ++i) yhat[i] = sigmoid(eta(static_cast<Eigen::Index>(i)));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double d = ds.prob(i, k) - yhat[i];
      total += d * d;
    }
  }
  return make_result("eci", total / static_cast<double>(n * ds.k()), {0.0, 1.0});
}

namespace {

Eigen::MatrixXd hinge_design(const std::vector<double>& x, const std::vector<double>& knots) {
  Eigen::MatrixXd d(static_cast<Eigen::Index>(x.size()),
                    static_cast<Eigen::Index>(knots.size() + 2));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    d(r, 0) = 1.0;
    d(r, 1) = x[i];
    for (std::size_t j = 0; j < knots.size(); ++j) {
      d(r, static_cast<Eigen::Index>(j + 2)) = std::max(0.0, x[i] - knots[j]);
    }
  }
  return d;
}

double fott_x(FottFamily family, double c) {
  return family == FottFamily::kPl3 ? logit(clamp_unit(c, kLogitClamp)) : c;
}

// Continuous piecewise-linear fit with `segments` pieces split at quantiles.
std::function<double(double)> fit_piecewise(const std::vector<double>& c,
                                            const std::vector<double>& y, FottFamily family,
                                            std::size_t segments) {
  std::vector<double> x(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) x[i] = fott_x(family, c[i]);
  std::vector<double> knots;
  for (std::size_t j = 1; j < segments; ++j) {
    knots.push_back(quantile(x, static_cast<double>(j) / static_cast<double>(segments)));
  }
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  const Eigen::MatrixXd design = hinge_design(x, knots);
  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  Eigen::VectorXd coef;
  if (family == FottFamily::kPl3) {
    const auto lf = fit::logistic_irls(design, yv, 1e-6);
    if (!lf.converged || !lf.coef.allFinite()) {
      throw Error(ErrorCode::kFitFailure, "logit-logit piecewise fit did not converge");
    }
    coef = lf.coef;
  } else {
    coef = fit::least_squares(design, yv).coef;
    if (!coef.allFinite()) throw Error(ErrorCode::kFitFailure, "piecewise fit failed");
  }
  return [coef, knots, family](double c) {
    const double x = fott_x(family, c);
    double eta = coef(0) + coef(1) * x;
    for (std::size_t j = 0; j < knots.size(); ++j) {
      eta += coef(static_cast<Eigen::Index>(j + 2)) * std::max(0.0, x - knots[j]);
    }
    const double v = family == FottFamily::kPl3 ? sigmoid(eta) : eta;
    return std::clamp(v, 0.001, 0.999);
  };
}

}  // namespace

FottFit fott_fit(const BinaryView& view, const FottOptions& opts) {
  if (opts.folds < 2) throw Error(ErrorCode::kInvalidArgument, "folds must be >= 2");
  if (view.size() < 10 * opts.folds) throw Error(ErrorCode::kTooFewPoints, "too few points for the fold count");
  std::vector<std::size_t> perm(view.size());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(opts.seed);
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  std::vector<std::size_t> fold_of(view.size());
  for (std::size_t j = 0; j < perm.size(); ++j) fold_of[perm[j]] = j % opts.folds;
  std::vector<std::vector<double>> tc(opts.folds), ty(opts.folds);
  for (std::size_t i = 0; i < view.size(); ++i) {
    for (std::size_t f = 0; f < opts.folds; ++f) {
      if (fold_of[i] != f) {
        tc[f].push_back(view.c[i]);
        ty[f].push_back(view.y[i]);
      }
    }
  }
  auto fold_maps = [&](std::size_t segments) {
    std::vector<std::function<double(double)>> maps;
    for (std::size_t f = 0; f < opts.folds; ++f) {
      maps.push_back(fit_piecewise(tc[f], ty[f], opts.family, segments));
    }
    return maps;
  };
  std::size_t chosen = opts.segments;
  if (chosen == 0) {
    double best = kInf;
    for (std::size_t s = 1; s <= opts.max_segments; ++s) {
      const auto maps = fold_maps(s);
      double err = 0.0;
      for (std::size_t i = 0; i < view.size(); ++i) {
        const double d = maps[fold_of[i]](view.c[i]) - view.y[i];
        err += d * d;
      }
      if (err < best) {
        best = err;
        chosen = s;
      }
    }
  }
  const auto maps = fold_maps(chosen);
  FottFit out;
  out.segments = chosen;
  out.map.provenance =
      opts.family == FottFamily::kPl3 ? MapProvenance::kPl3Logit : MapProvenance::kPiecewiseLinear;
  out.map.eval = [maps](double c) {
    double s = 0.0;
    for (const auto& m : maps) s += m(c);
    return s / static_cast<double>(maps.size());
  };
  out.metric = ece_fott(out.map.eval, view, 1.0);
  out.metric.name = opts.family == FottFamily::kPl3 ? "ece_pl3" : "ece_pl";
  out.metric.details["segments"] = static_cast<double>(chosen);
  return out;
}

CoxResult cox_intercept_slope(const BinaryView& view) {
  require_nonempty(view);
  double max0 = -kInf, min0 = kInf, max1 = -kInf, min1 = kInf;
  const auto n = static_cast<Eigen::Index>(view.size());
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = view.c[static_cast<std::size_t>(i)];
    if (c <= 0.0 || c >= 1.0) throw Error(ErrorCode::kBoundaryConfidence, "Cox fit needs c in (0,1)");
    const double l = logit(c);
    x(i, 0) = 1.0;
    x(i, 1) = l;
    y(i) = view.y[static_cast<std::size_t>(i)];
    if (y(i) > 0.5) {
      max1 = std::max(max1, l);
      min1 = std::min(min1, l);
    } else {
      max0 = std::max(max0, l);
      min0 = std::min(min0, l);
    }
  }
  if (std::isinf(max0) || std::isinf(max1) || max0 < min1 || max1 < min0) {
    throw Error(ErrorCode::kSeparationFailure, "outcomes are perfectly separated by logit(c)");
  }
  const auto lf = fit::logistic_irls(x, y, 0.0, 100, 1e-8);
  if (!lf.converged || !lf.coef.allFinite()) {
    throw Error(ErrorCode::kSeparationFailure, "Cox logistic fit did not converge");
  }
  const double a = lf.coef(0), b = lf.coef(1);
  const double se_a = std::sqrt(lf.cov(0, 0)), se_b = std::sqrt(lf.cov(1, 1));
  CoxResult out;
  out.intercept = make_result("cox_intercept", a, {-kInf, kInf}, Orientation::kSignedZeroPerfect);
  out.intercept.p_value = std::min(1.0, 2.0 * normal_sf(std::abs(a / se_a)));
  out.intercept.details["se"] = se_a;
  out.slope = make_result("cox_slope", b, {-kInf, kInf}, Orientation::kOneIsPerfect);
  out.slope.p_value = std::min(1.0, 2.0 * normal_sf(std::abs((b - 1.0) / se_b)));
  out.slope.details["se"] = se_b;
  return out;
}

SbctResult sbct_fit(const BinaryView& view, std::size_t grid) {
  require_nonempty(view);
  if (grid < 2) throw Error(ErrorCode::kInvalidArgument, "grid must have >= 2 points");
  const auto n = static_cast<Eigen::Index>(view.size());
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = clamp_unit(view.c[static_cast<std::size_t>(i)], kLogitClamp);
    x(i, 0) = 1.0;
    x(i, 1) = std::log(c);
    x(i, 2) = -std::log1p(-c);
    y(i) = view.y[static_cast<std::size_t>(i)];
  }
  const auto lf = fit::logistic_irls(x, y, 0.0, 100, 1e-8);
  if (!lf.converged || !lf.coef.allFinite()) {
    throw Error(ErrorCode::kFitFailure, "beta calibration fit did not converge");
  }
  SbctResult out;
  out.m = lf.coef(0);
  out.a = lf.coef(1);
  out.b = lf.coef(2);
  out.map.provenance = MapProvenance::kBetaFit;
  out.map.eval = [m = out.m, a = out.a, b = out.b](double c) {
    c = clamp_unit(c, 1e-12);
    return sigmoid(m + a * std::log(c) - b * std::log1p(-c));
  };
  // Trapezoid rule on G equally spaced points covering [0, 1].
  const double step = 1.0 / static_cast<double>(grid - 1);
  double area = 0.0;
  for (std::size_t g = 0; g < grid; ++g) {
    const double t = static_cast<double>(g) * step;
    const double f = std::abs(out.map(t) - t);
    area += (g == 0 || g + 1 == grid) ? 0.5 * f : f;
  }
  area *= step;
  out.metric = make_result("sbct", area, {0.0, 1.0});
  const double scale = 1.0 / std::sqrt(91.0 * static_cast<double>(view.size()));
  out.metric.p_value = 1.0 - gamma_cdf(area, 4.74, scale);
  out.metric.details["a"] = out.a;
  out.metric.details["b"] = out.b;
  out.metric.details["m"] = out.m;
  return out;
}

MetricResult sbct(const BinaryView& view, std::size_t grid) { return sbct_fit(view, grid).metric; }

MetricResult pws(const BinaryView& view, PwsCovariance cov) {
  if (view.size() < 10) throw Error(ErrorCode::kTooFewPoints, "PWS needs at least 10 points");
  std::vector<double> distinct = view.c;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) throw Error(ErrorCode::kSingularDesign, "parabola needs 3 distinct confidences");
  const auto n = static_cast<Eigen::Index>(view.size());
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = view.c[static_cast<std::size_t>(i)];
    x(i, 0) = 1.0;
    x(i, 1) = c;
    x(i, 2) = c * c;
    y(i) = view.y[static_cast<std::size_t>(i)];
  }
  const auto lf = fit::least_squares(x, y);
  if (lf.rank < 3) throw Error(ErrorCode::kSingularDesign, "parabola design is rank deficient");
  Eigen::Matrix3d v;
  if (cov == PwsCovariance::kOls) {
    const double s2 = lf.residuals.squaredNorm() / static_cast<double>(n - 3);
    v = s2 * lf.xtx_inv;
  } else {
    const Eigen::MatrixXd meat = x.transpose() * lf.residuals.array().square().matrix().asDiagonal() * x;
    v = lf.xtx_inv * meat * lf.xtx_inv;
  }
  const Eigen::Vector3d d = lf.coef - Eigen::Vector3d(0.0, 1.0, 0.0);
  double stat = 0.0;
  Eigen::FullPivLU<Eigen::Matrix3d> lu(v);
  // An exact fit leaves a rounding-noise covariance; decide on d alone.
  const bool exact = lf.residuals.cwiseAbs().maxCoeff() < 1e-12;
  if (!exact && lu.isInvertible()) {
    stat = d.dot(lu.solve(d));
  } else {
    stat = d.norm() < 1e-9 ? 0.0 : kInf;
  }
  auto r = make_result("pws", stat, {0.0, kInf});
  r.p_value = chi_squared_sf(stat, 3.0);
  r.details["theta0"] = lf.coef(0);
  r.details["theta1"] = lf.coef(1);
  r.details["theta2"] = lf.coef(2);
  r.details["hc0"] = cov == PwsCovariance::kHc0 ? 1.0 : 0.0;
  return r;
}

}  // namespace calmet

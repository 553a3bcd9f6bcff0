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

#include "calmet/stats.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>

#include "calmet/core.h"

namespace calmet {

namespace {
constexpr double kSeriesTol = 1e-12;
}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double chi_squared_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::cdf(
      boost::math::complement(boost::math::chi_squared_distribution<>(dof), x));
}

double gamma_cdf(double x, double shape, double scale) {
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::cdf(boost::math::gamma_distribution<>(shape, scale), x);
}

double brownian_max_abs_sf(double x) {
  if (x <= 0.0) return 1.0;
  // P(sup|B| < x) = (4/pi) sum_k (-1)^k/(2k+1) exp(-pi^2 (2k+1)^2 / (8 x^2)).
  const double pi2 = std::numbers::pi * std::numbers::pi;
  double cdf = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double odd = 2.0 * k + 1.0;
    const double term = std::exp(-pi2 * odd * odd / (8.0 * x * x)) / odd;
    cdf += (k % 2 == 0 ? term : -term);
    if (term < kSeriesTol) break;
  }
  cdf *= 4.0 / std::numbers::pi;
  return std::clamp(1.0 - cdf, 0.0, 1.0);
}

double brownian_max_abs_sf_reflection(double x) {
  if (x <= 0.0) return 1.0;
  // P(sup|B| >= x) = 2 sum_{k>=1} (-1)^{k-1} 2 P(Z >= (2k-1) x).
  double sf = 0.0;
  for (int k = 1; k < 100000; ++k) {
    const double term = 4.0 * normal_sf((2.0 * k - 1.0) * x);
    sf += (k % 2 == 1 ? term : -term);
    if (term < kSeriesTol) break;
  }
  return std::clamp(sf, 0.0, 1.0);
}

double brownian_range_sf(double x) {
  if (x <= 0.0) return 1.0;
  // Range density 8 sum_{k>=1} (-1)^{k-1} k^2 phi(k x); integrating the tail
  // gives P(R >= x) = 8 sum_{k>=1} (-1)^{k-1} k P(Z >= k x).
  if (x < 0.05) return 1.0;
  double sf = 0.0;
  for (int k = 1; k < 1000000; ++k) {
    const double term = 8.0 * k * normal_sf(k * x);
    sf += (k % 2 == 1 ? term : -term);
    if (term < kSeriesTol) break;
  }
  return std::clamp(sf, 0.0, 1.0);
}

double ks_uniform_distance(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double hi = (static_cast<double>(i) + 1.0) / n - samples[i];
    const double lo = samples[i] - static_cast<double>(i) / n;
    d = std::max({d, hi, lo});
  }
  return d;
}

double quantile(std::vector<double> data, double q) {
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "quantile of empty data");
  std::sort(data.begin(), data.end());
  const double pos = q * static_cast<double>(data.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, data.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return data[lo] + frac * (data[hi] - data[lo]);
}

double median(std::vector<double> data) { return quantile(std::move(data), 0.5); }

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double logit(double p) { return std::log(p / (1.0 - p)); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finaliser over the combined state.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::beta(double a, double b) {
  const double x = std::gamma_distribution<double>(a, 1.0)(engine_);
  const double y = std::gamma_distribution<double>(b, 1.0)(engine_);
  return x / (x + y);
}

}  // namespace calmet

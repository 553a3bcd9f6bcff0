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

// Distribution functions, order statistics and seeded random streams shared
// by the metric modules.

#ifndef CALMET_STATS_H_
#define CALMET_STATS_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace calmet {

double normal_cdf(double x);
double normal_sf(double x);
double chi_squared_sf(double x, double dof);
double gamma_cdf(double x, double shape, double scale);

// P(max_{t in [0,1]} |B(t)| >= x) for standard Brownian motion B, evaluated
// with the theta-function series (fast for small x).
double brownian_max_abs_sf(double x);
// Same quantity from the reflection-principle series (fast for large x).
double brownian_max_abs_sf_reflection(double x);
// P(max B - min B >= x) over [0,1].
double brownian_range_sf(double x);

// Kolmogorov distance between the empirical distribution of `samples` and
// Uniform[0,1].
double ks_uniform_distance(std::vector<double> samples);

// Linear-interpolation quantile (type 7) of unsorted data, q in [0,1].
double quantile(std::vector<double> data, double q);
double median(std::vector<double> data);
double mean(std::span<const double> x);
// Sample standard deviation (N - 1 denominator).
double stddev(std::span<const double> x);

double logit(double p);
double sigmoid(double x);

// Mixes a base seed with a stream index into an independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Seeded pseudo-random stream. Sub-streams derived through `derive_seed`
// make per-round results independent of evaluation order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  double beta(double a, double b);
  bool bernoulli(double p) { return uniform() < p; }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace calmet

#endif  // CALMET_STATS_H_

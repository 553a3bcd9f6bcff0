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

#include "calmet/synth.h"

#include <algorithm>
#include <cmath>

#include "calmet/stats.h"

namespace calmet {

double true_map(const SynthSpec& spec, double c) {
  switch (spec.map) {
    case TrueMapKind::kIdentity:
      return c;
    case TrueMapKind::kTemperature:
      if (c <= 0.0 || c >= 1.0) return c;
      return sigmoid(logit(c) / spec.tau);
    case TrueMapKind::kBetaFamily: {
      if (c <= 0.0) return spec.beta_a > 0.0 ? 0.0 : 1.0;
      if (c >= 1.0) return spec.beta_b > 0.0 ? 1.0 : 0.0;
      return sigmoid(spec.beta_m + spec.beta_a * std::log(c) - spec.beta_b * std::log1p(-c));
    }
    case TrueMapKind::kParabola:
      return std::clamp(spec.theta[0] + spec.theta[1] * c + spec.theta[2] * c * c, 0.0, 1.0);
  }
  return c;
}

namespace {

void check(const SynthSpec& spec) {
  if (spec.n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  if (spec.k < 2) throw Error(ErrorCode::kInvalidArgument, "K must be >= 2");
  if (spec.map == TrueMapKind::kTemperature && !(spec.tau > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tau must be > 0");
  }
  if (spec.dist == ConfidenceDist::kBeta && !(spec.dist_a > 0.0 && spec.dist_b > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "beta shapes must be > 0");
  }
}

}  // namespace

SynthData generate(const SynthSpec& spec) {
  check(spec);
  Rng rng(spec.seed);
  SynthData out;
  out.map = [spec](double c) { return true_map(spec, c); };
  if (spec.k == 2) {
    std::vector<int> y(spec.n);
    std::vector<double> c(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
      c[i] = spec.dist == ConfidenceDist::kUniform ? rng.uniform() : rng.beta(spec.dist_a, spec.dist_b);
      y[i] = rng.bernoulli(true_map(spec, c[i])) ? 1 : 0;
    }
    out.data = make_binary_dataset(y, c);
    return out;
  }
  const std::size_t k = spec.k;
  std::vector<int> labels(spec.n);
  std::vector<double> probs(spec.n * k);
  std::vector<double> z(k), q(k);
  auto softmax = [k](const std::vector<double>& s, double scale, double* dst) {
    const double top = *std::max_element(s.begin(), s.end()) / scale;
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) sum += (dst[j] = std::exp(s[j] / scale - top));
    for (std::size_t j = 0; j < k; ++j) dst[j] /= sum;
  };
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (auto& v : z) v = spec.score_scale * rng.normal();
    const double tau = spec.map == TrueMapKind::kTemperature ? spec.tau : 1.0;
    softmax(z, tau, probs.data() + i * k);
    softmax(z, 1.0, q.data());
    double u = rng.uniform(), acc = 0.0;
    std::size_t lbl = k - 1;
    for (std::size_t j = 0; j < k; ++j) {
      acc += q[j];
      if (u < acc) {
        lbl = j;
        break;
      }
    }
    labels[i] = static_cast<int>(lbl);
  }
  out.data = make_dataset(std::move(labels), std::move(probs), k);
  return out;
}

double true_ce(const SynthSpec& spec, double p, std::size_t grid) {
  check(spec);
  if (grid < 1) throw Error(ErrorCode::kInvalidArgument, "grid must be >= 1");
  const double a = spec.dist == ConfidenceDist::kUniform ? 1.0 : spec.dist_a;
  const double b = spec.dist == ConfidenceDist::kUniform ? 1.0 : spec.dist_b;
  const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  const double h = 1.0 / static_cast<double>(grid);
  double total = 0.0;
  for (std::size_t g = 0; g < grid; ++g) {
    const double c = (static_cast<double>(g) + 0.5) * h;
    const double dens = std::exp(log_norm + (a - 1.0) * std::log(c) + (b - 1.0) * std::log1p(-c));
    total += std::pow(std::abs(true_map(spec, c) - c), p) * dens;
  }
  return total * h;
}

}  // namespace calmet

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

// Synthetic predictions with a known calibration map, used by the bias
// harness and the Monte Carlo checks.

#ifndef CALMET_SYNTH_H_
#define CALMET_SYNTH_H_

#include <array>
#include <cstdint>
#include <functional>

#include "calmet/core.h"

namespace calmet {

enum class ConfidenceDist { kUniform, kBeta };
enum class TrueMapKind { kIdentity, kTemperature, kBetaFamily, kParabola };

struct SynthSpec {
  ConfidenceDist dist = ConfidenceDist::kUniform;
  double dist_a = 1.0;  // beta confidence shape
  double dist_b = 1.0;
  TrueMapKind map = TrueMapKind::kIdentity;
  double tau = 1.0;  // temperature: map(c) = sigmoid(logit(c) / tau)
  double beta_a = 1.0, beta_b = 1.0, beta_m = 0.0;  // sigmoid(m + a ln c - b ln(1 - c))
  std::array<double, 3> theta{0.0, 1.0, 0.0};  // parabola, clipped to [0, 1]
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::size_t k = 2;
  double score_scale = 2.0;  // K > 2: standard deviation of the latent scores
};

// P(y = 1 | c) under the spec's true map.
double true_map(const SynthSpec& spec, double c);

struct SynthData {
  Dataset data;
  std::function<double(double)> map;
};

// K = 2: c from the confidence distribution, y ~ Bernoulli(map(c)).
// K > 2: latent scores z ~ N(0, s^2) per class; predictions softmax(z / tau),
// labels drawn from softmax(z), so tau = 1 is calibrated.
SynthData generate(const SynthSpec& spec);

// Integral of |map(c) - c|^p against the confidence density (midpoint rule).
double true_ce(const SynthSpec& spec, double p = 1.0, std::size_t grid = 100000);

}  // namespace calmet

#endif  // CALMET_SYNTH_H_

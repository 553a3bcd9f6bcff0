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

// Small builders shared by the unit tests.

#ifndef CALMET_TESTS_HELPERS_H_
#define CALMET_TESTS_HELPERS_H_

#include <vector>

#include "calmet/core.h"
#include "calmet/synth.h"

namespace calmet::testing {

inline BinaryView V(std::vector<double> y, std::vector<double> c) {
  return make_view(std::move(y), std::move(c));
}

// Calibrated binary sample: c ~ U(0,1), y ~ Bernoulli(c).
inline BinaryView calibrated(std::size_t n, std::uint64_t seed) {
  SynthSpec spec;
  spec.n = n;
  spec.seed = seed;
  return native_binary_view(generate(spec).data);
}

inline BinaryView tempered(std::size_t n, double tau, std::uint64_t seed) {
  SynthSpec spec;
  spec.n = n;
  spec.seed = seed;
  spec.map = TrueMapKind::kTemperature;
  spec.tau = tau;
  return native_binary_view(generate(spec).data);
}

}  // namespace calmet::testing

#endif  // CALMET_TESTS_HELPERS_H_

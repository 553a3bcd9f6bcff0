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

// Prints the library's value for every hand-derived example as one JSON
// object keyed by example id; check_examples.py recomputes each one.

#include <cmath>
#include <iostream>

#include "calmet/binned.h"
#include "calmet/cumulative.h"
#include "calmet/kernelcurve.h"
#include "calmet/objdet.h"
#include "calmet/point.h"
#include "calmet/report.h"
#include "calmet/synth.h"
#include "json.hpp"

using namespace calmet;

namespace {

BinaryView V(std::vector<double> y, std::vector<double> c) {
  return make_view(std::move(y), std::move(c));
}

Box unit(double x, int cls = 0, double score = 1.0) { return {x, 0.0, 1.0, 1.0, cls, score, 0}; }

}  // namespace

int main() {
  nlohmann::ordered_json out;
  const Dataset p37 = make_dataset({1}, {{0.3, 0.7}});
  const BinaryView one = V({1}, {0.7});
  const BinaryView eight = V({1}, {0.8});
  const BinaryView four = V({0, 1, 1, 1}, {0.2, 0.3, 0.8, 0.9});
  const auto two = BinningSpec::EqualWidth(2);

  out["brier_single"] = brier(p37).value;
  out["nll_single"] = nll(one).value;
  FocalOptions g2;
  g2.gamma = 2.0;
  out["focal_single"] = focal_loss(p37, g2).value;
  out["ecd_single"] = ecd(one).value;
  out["eo_pair"] = global_bias(V({1, 0}, {0.6, 0.4}), GlobalBiasKind::kEo).value;
  out["success_tie"] = success_rate(make_dataset({1}, {{0.5, 0.5}})).value;
  out["nses_single"] = normalized_square(eight, NormalizedSquareKind::kNses).value;
  out["dss_single"] = normalized_square(eight, NormalizedSquareKind::kDss).value;
  out["spiegelhalter_pair"] = spiegelhalter_z(V({0, 1}, {0.2, 0.8})).value;
  out["pss_single"] = alpha_score(p37, 2.0, AlphaKind::kPseudoSpherical).value;
  out["power_verbatim"] = alpha_score(p37, 2.0, AlphaKind::kPower).value;
  out["power_corrected"] = alpha_score(p37, 2.0, AlphaKind::kPower, true).value;
  out["soft_f1_zeros"] = soft_f1(V({0, 0}, {0.0, 0.0})).value;
  out["soft_f1_miss"] = soft_f1(V({0}, {1.0})).value;
  out["rps_three"] = rps(make_dataset({0}, {{0.5, 0.3, 0.2}})).value;

  out["ece_four"] = binned_ce(four, two).value;
  out["mce_four"] = binned_ce(four, two, kInf).value;
  out["ice_alpha"] = imbalance_alpha({0.9, 0.1});
  std::vector<double> sy{1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0}, sc(11, 0.7);
  sc[0] = 0.1;
  out["rbece_sparse"] = rbece(V(sy, sc), two, 2).value;
  out["ece_sparse"] = binned_ce(V(sy, sc), two).value;
  out["cece_pair"] = cece({0.1, 0.3}).value;
  const BinaryView cancel = V({1, 1, 0, 0, 0, 1, 1, 1, 0, 0},
                              {0.2, 0.2, 0.2, 0.2, 0.2, 0.8, 0.8, 0.8, 0.8, 0.8});
  out["esce_cancel"] = esce(cancel, two).value;
  out["ece_cancel"] = binned_ce(cancel, two).value;
  out["hl_four"] = hl_statistic(four, two).value;
  std::vector<std::vector<double>> top(5, {0.0, 1.0});
  out["hcs_08"] = hcs(make_dataset({1, 1, 1, 1, 0}, top), BinningSpec::EqualWidth(10)).value;

  out["msce_single"] = msce(one).value;
  const Dataset same = make_binary_dataset({1, 0, 1, 1, 0, 1}, std::vector<double>(6, 0.4));
  out["bkde_identical"] = kde_ce(same, KdeKind::kBeta).value;
  out["mmce_single"] = pairwise_kernel_ce(one, PairwiseKind::kMmce).value;
  out["reliability_cluster"] = cluster_reliability(3.0, 10, 0.3);
  out["smooth_ce_shift"] = smooth_ce(V({0.5, 0.8}, {0.2, 0.5})).value;
  std::vector<double> lc(500), ly(500);
  for (std::size_t i = 0; i < 500; ++i) {
    lc[i] = (i + 0.5) / 500;
    ly[i] = 0.5 * lc[i] + 0.25;
  }
  out["ici_linear"] = loess_metrics(V(ly, lc))[0].value;

  const auto tr = cdp(V({1}, {0.6}));
  out["cdp_single"] = tr.cdp.back();
  out["ecce_mad_single"] = ecce(V({1}, {0.6}), EcceKind::kMad).value;
  out["sigma_n_single"] = tr.sigma_n;

  out["iou_strip"] = iou(unit(0), unit(0.5));
  out["laace0_single"] = laace0(match({unit(1.0 / 3, 0, 0.9)}, {unit(0)})).value;
  const auto pair = match({unit(0.1, 0, 0.7), unit(20.2, 0, 0.4)}, {unit(0), unit(20)});
  out["l1cbod_pair"] = l1cbod(pair).value;
  out["qgc_pair"] = global_det(match({unit(0, 0, 0.8), unit(5, 0, 0.3)}, {unit(0)}),
                               GlobalDetKind::kQgc).value;
  out["sgc_single"] = global_det(match({unit(0, 0, 0.8)}, {unit(0)}), GlobalDetKind::kSgc).value;

  const auto bc = brier_curve(V({0, 0, 1, 1}, {0.0, 0.0, 1.0, 1.0}), 100);
  double interior = 0.0;
  for (std::size_t g = 1; g + 1 < bc.brier.size(); ++g) interior = std::max(interior, std::abs(bc.brier[g]));
  out["brier_curve_separated"] = interior;
  SynthSpec sq;
  sq.map = TrueMapKind::kParabola;
  sq.theta = {0.0, 0.0, 1.0};
  out["true_ce_square"] = true_ce(sq);

  std::cout << out.dump(2) << "\n";
  return 0;
}

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

#include "calmet/objdet.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "calmet/kernelcurve.h"

namespace calmet {

void validate_box(const Box& b) {
  if (!(b.w >= 0.0) || !(b.h >= 0.0)) throw Error(ErrorCode::kNegativeExtent, "box extent < 0");
  if (!(b.score >= 0.0 && b.score <= 1.0)) {
    throw Error(ErrorCode::kOutOfRangeProbability, "box score outside [0,1]");
  }
}

double iou(const Box& a, const Box& b) {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::size_t MatchedSet::tp_count() const {
  return static_cast<std::size_t>(std::count_if(detections.begin(), detections.end(),
                                                [](const MatchedDetection& d) { return d.tp; }));
}

std::size_t MatchedSet::fp_count() const { return detections.size() - tp_count(); }

MatchedSet match(const std::vector<Box>& dets, const std::vector<Box>& gts,
                 double iou_threshold, bool same_class) {
  for (const auto& b : dets) validate_box(b);
  for (const auto& b : gts) validate_box(b);
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
  std::vector<bool> used(gts.size(), false);
  MatchedSet out;
  for (std::size_t d : order) {
    const Box& det = dets[d];
    std::size_t best = gts.size();
    double best_iou = 0.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (used[g] || gts[g].image != det.image) continue;
      if (same_class && gts[g].cls != det.cls) continue;
      const double v = iou(det, gts[g]);
      if (v > 0.0 && v >= iou_threshold && v > best_iou) {
        best = g;
        best_iou = v;
      }
    }
    MatchedDetection md{det, false, 0.0};
    if (best < gts.size()) {
      used[best] = true;
      md.tp = true;
      md.iou = best_iou;
    }
    out.detections.push_back(md);
  }
  std::set<int> classes;
  for (const auto& b : dets) classes.insert(b.cls);
  for (std::size_t g = 0; g < gts.size(); ++g) {
    classes.insert(gts[g].cls);
    if (!used[g]) out.unmatched_gt.push_back(gts[g]);
  }
  out.classes.assign(classes.begin(), classes.end());
  return out;
}

namespace {

std::size_t ew_bin(double v, std::size_t bins) {
  const double b = static_cast<double>(bins);
  return std::min(bins - 1, static_cast<std::size_t>(std::floor(std::clamp(v, 0.0, 1.0) * b)));
}

struct Acc {
  std::size_t n = 0;
  double tp = 0.0;
  double score = 0.0;
  double iou = 0.0;
};

double dim_value(const MatchedDetection& d, DetDim dim, const DetBinnedOptions& opts) {
  ImageSize sz;
  if (auto it = opts.image_sizes.find(d.box.image); it != opts.image_sizes.end()) sz = it->second;
  switch (dim) {
    case DetDim::kScore: return d.box.score;
    case DetDim::kX: return d.box.x / sz.width;
    case DetDim::kY: return d.box.y / sz.height;
    case DetDim::kW: return d.box.w / sz.width;
    case DetDim::kH: return d.box.h / sz.height;
  }
  return 0.0;
}

}  // namespace

MetricResult det_binned(const MatchedSet& m, const DetBinnedOptions& opts) {
  if (m.detections.empty()) throw Error(ErrorCode::kNoDetections, "no detections");
  const bool laece = opts.kind == DetBinnedKind::kLaece || opts.kind == DetBinnedKind::kLaece0;
  const std::size_t bins = opts.bins ? opts.bins : (laece ? 25 : 15);
  if (laece) {
    const double thr = opts.kind == DetBinnedKind::kLaece0 ? 0.0 : opts.score_threshold;
    double total = 0.0;
    for (int k : m.classes) {
      std::vector<Acc> acc(bins);
      std::size_t nk = 0;
      for (const auto& d : m.detections) {
        if (d.box.cls != k || d.box.score < thr) continue;
        Acc& a = acc[ew_bin(d.box.score, bins)];
        ++a.n;
        a.tp += d.tp ? 1.0 : 0.0;
        a.score += d.box.score;
        a.iou += d.tp ? d.iou : 0.0;
        ++nk;
      }
      if (nk == 0) continue;
      for (const Acc& a : acc) {
        if (a.n == 0) continue;
        const double nb = static_cast<double>(a.n);
        const double mean_iou = a.tp > 0.0 ? a.iou / a.tp : 0.0;
        total += nb / static_cast<double>(nk) * std::abs(a.tp / nb * mean_iou - a.score / nb);
      }
    }
    auto r = make_result(opts.kind == DetBinnedKind::kLaece0 ? "laece0" : "laece",
                         total / static_cast<double>(m.classes.size()), {0.0, 1.0});
    r.details["score_threshold"] = thr;
    return r;
  }
  const std::vector<DetDim> dims =
      opts.kind == DetBinnedKind::kAce ? std::vector<DetDim>{DetDim::kScore} : opts.dims;
  if (dims.empty()) throw Error(ErrorCode::kInvalidArgument, "dece needs at least one dimension");
  std::map<std::size_t, Acc> cells;
  for (const auto& d : m.detections) {
    std::size_t cell = 0;
    for (DetDim dim : dims) cell = cell * bins + ew_bin(dim_value(d, dim, opts), bins);
    Acc& a = cells[cell];
    ++a.n;
    a.tp += d.tp ? 1.0 : 0.0;
    a.score += d.box.score;
  }
  const double n = static_cast<double>(m.detections.size());
  double total = 0.0;
  std::size_t used = 0;
  for (const auto& [cell, a] : cells) {
    const double nb = static_cast<double>(a.n);
    const double gap = std::abs(a.tp / nb - a.score / nb);
    if (opts.kind == DetBinnedKind::kAce) {
      total += gap;
      ++used;
    } else if (a.n >= opts.min_count) {
      total += nb / n * gap;
      ++used;
    }
  }
  const bool ace = opts.kind == DetBinnedKind::kAce;
  auto r = make_result(ace ? "ace" : "dece", ace ? total / static_cast<double>(used) : total,
                       {0.0, 1.0});
  r.details["cells_total"] = std::pow(static_cast<double>(bins), static_cast<double>(dims.size()));
  r.details["cells_used"] = static_cast<double>(used);
  return r;
}

MetricResult laace0(const MatchedSet& m) {
  if (m.detections.empty()) throw Error(ErrorCode::kNoDetections, "no detections");
  double total = 0.0;
  for (int k : m.classes) {
    double s = 0.0;
    std::size_t vk = 0;
    for (const auto& d : m.detections) {
      if (d.box.cls != k) continue;
      s += std::abs(d.iou - d.box.score);
      ++vk;
    }
    if (vk) total += s / static_cast<double>(vk);
  }
  return make_result("laace0", total / static_cast<double>(m.classes.size()), {0.0, 1.0});
}

MetricResult l1cbod(const MatchedSet& m, Link psi, std::optional<double> bandwidth) {
  const std::size_t v = m.detections.size();
  if (v < 2) throw Error(ErrorCode::kTooFewDetections, "L1CBOD needs at least 2 detections");
  auto k = [](double at, double centre, double h) {
    return kernel_weight(KernelFamily::kBeta, at, centre, h);
  };
  double h = 0.0;
  if (bandwidth) {
    if (!(*bandwidth > 0.0)) throw Error(ErrorCode::kInvalidArgument, "bandwidth must be > 0");
    h = *bandwidth;
  } else {
    double best = -kInf;
    for (int g = 0; g < 25; ++g) {
      const double cand = 0.002 * std::pow(250.0, g / 24.0);
      double ll = 0.0;
      for (std::size_t a = 0; a < v; ++a) {
        double s = 0.0;
        for (std::size_t b = 0; b < v; ++b) {
          if (a != b) s += k(m.detections[a].box.score, m.detections[b].box.score, cand);
        }
        ll += std::log(std::max(s / static_cast<double>(v - 1), 1e-300));
      }
      if (ll > best) {
        best = ll;
        h = cand;
      }
    }
  }
  double total = 0.0;
  for (std::size_t a = 0; a < v; ++a) {
    const double cv = m.detections[a].box.score;
    double num = 0.0, den = 0.0;
    for (std::size_t b = 0; b < v; ++b) {
      if (a == b) continue;
      const double w = k(cv, m.detections[b].box.score, h);
      num += w * psi(m.detections[b].iou);
      den += w;
    }
    total += std::abs((den > 0.0 ? num / den : 0.0) - cv);
  }
  auto r = make_result("l1cbod", total / static_cast<double>(v), {0.0, 1.0});
  r.details["bandwidth"] = h;
  return r;
}

MetricResult global_det(const MatchedSet& m, GlobalDetKind kind, bool normalized) {
  const std::size_t tp = m.tp_count(), fp = m.fp_count(), fn = m.fn_count();
  const double n = static_cast<double>(tp + fp + fn);
  if (kind == GlobalDetKind::kEgce) {
    constexpr std::size_t kBins = 15;
    std::vector<Acc> acc(kBins);
    std::size_t used = 0;
    for (const auto& d : m.detections) {
      if (d.box.score < 0.1) continue;
      Acc& a = acc[ew_bin(d.box.score, kBins)];
      ++a.n;
      a.tp += d.tp ? 1.0 : 0.0;
      a.score += d.box.score;
      ++used;
    }
    // Missed objects enter as false positives of confidence one.
    acc[kBins - 1].n += fn;
    acc[kBins - 1].score += static_cast<double>(fn);
    used += fn;
    double total = 0.0;
    for (const Acc& a : acc) {
      if (a.n == 0) continue;
      const double nb = static_cast<double>(a.n);
      total += nb / static_cast<double>(used) * std::abs(a.tp / nb - a.score / nb);
    }
    return make_result("egce", used ? total : 0.0, {0.0, 1.0});
  }
  double s = 0.0;
  if (kind == GlobalDetKind::kQgc) {
    for (const auto& d : m.detections) {
      const double c = d.box.score;
      s += d.tp ? (c - 1.0) * (c - 1.0) : c * c;
    }
    s += static_cast<double>(fn);
  } else {
    s = n;
    for (const auto& d : m.detections) {
      const double c = d.box.score;
      const double r = std::sqrt(c * c + (1.0 - c) * (1.0 - c));
      s += d.tp ? -c / r : (1.0 - c) / r;
    }
  }
  const char* name = kind == GlobalDetKind::kQgc ? "qgc" : "sgc";
  if (normalized) {
    return make_result(name, n > 0.0 ? s / n : 0.0, {0.0, kind == GlobalDetKind::kQgc ? 1.0 : 2.0});
  }
  return make_result(name, s, {0.0, kInf});
}

}  // namespace calmet

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

#include "calmet/cli.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "calmet/binned.h"
#include "calmet/cumulative.h"
#include "calmet/kernelcurve.h"
#include "calmet/point.h"
#include "calmet/report.h"
#include "calmet/resample.h"

namespace calmet::cli {

using Json = nlohmann::ordered_json;

InputFormat ParseInputFormat(const std::string& s) {
  if (s == "csv") return InputFormat::kCsv;
  if (s == "jsonl") return InputFormat::kJsonl;
  throw Error(ErrorCode::kConfigError, "unknown input format '" + s + "'");
}

Task ParseTask(const std::string& s) {
  if (s == "classify") return Task::kClassify;
  if (s == "detect") return Task::kDetect;
  throw Error(ErrorCode::kConfigError, "unknown task '" + s + "'");
}

ViewChoice ParseViewChoice(const std::string& s) {
  if (s == "top-label") return ViewChoice::kTopLabel;
  if (s == "classwise") return ViewChoice::kClasswise;
  if (s == "native-binary") return ViewChoice::kNativeBinary;
  throw Error(ErrorCode::kConfigError, "unknown view '" + s + "'");
}

OutFormat ParseOutFormat(const std::string& s) {
  if (s == "json") return OutFormat::kJson;
  if (s == "csv") return OutFormat::kCsv;
  throw Error(ErrorCode::kConfigError, "unknown output format '" + s + "'");
}

const char* ViewChoiceName(ViewChoice v) {
  switch (v) {
    case ViewChoice::kTopLabel: return "top-label";
    case ViewChoice::kClasswise: return "classwise";
    case ViewChoice::kNativeBinary: return "native-binary";
  }
  return "unknown";
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) {
    const auto b = cur.find_first_not_of(" \t\r");
    const auto e = cur.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cur.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

bool parse_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

Dataset parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0, width = 0;
  bool shorthand = false, seen_first = false;
  std::vector<int> labels;
  std::vector<double> probs;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv(line);
    if (!seen_first) {
      seen_first = true;
      width = fields.size();
      if (width < 2) parse_fail(lineno, "expected at least two columns");
      int probe = 0;
      if (!parse_int(fields[0], probe)) {
        if (fields[0] != "label") parse_fail(lineno, "first header column must be 'label'");
        shorthand = width == 2 && fields[1] == "confidence";
        if (!shorthand) {
          for (std::size_t j = 1; j < width; ++j) {
            if (fields[j] != "p" + std::to_string(j - 1)) {
              parse_fail(lineno, "header column " + std::to_string(j + 1) + " must be 'p" +
                                     std::to_string(j - 1) + "'");
            }
          }
        }
        continue;
      }
      shorthand = width == 2;
    }
    if (fields.size() != width) {
      parse_fail(lineno, "expected " + std::to_string(width) + " fields, got " +
                             std::to_string(fields.size()));
    }
    int label = 0;
    if (!parse_int(fields[0], label)) parse_fail(lineno, "bad label '" + fields[0] + "'");
    labels.push_back(label);
    std::vector<double> row;
    for (std::size_t j = 1; j < width; ++j) {
      double v = 0.0;
      if (!parse_double(fields[j], v)) parse_fail(lineno, "bad probability '" + fields[j] + "'");
      row.push_back(v);
    }
    if (shorthand) {
      probs.push_back(1.0 - row[0]);
      probs.push_back(row[0]);
    } else {
      probs.insert(probs.end(), row.begin(), row.end());
    }
  }
  if (labels.empty()) throw Error(ErrorCode::kParseError, "no data rows");
  return make_dataset(std::move(labels), std::move(probs), shorthand ? 2 : width - 1);
}

Dataset parse_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0, k = 0;
  std::vector<int> labels;
  std::vector<double> probs;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json rec;
    try {
      rec = Json::parse(line);
    } catch (const Json::exception& e) {
      parse_fail(lineno, e.what());
    }
    if (!rec.is_object() || !rec.contains("label") || !rec.contains("probs") ||
        !rec["label"].is_number_integer() || !rec["probs"].is_array()) {
      parse_fail(lineno, "expected {\"label\": int, \"probs\": [...]}");
    }
    const auto& p = rec["probs"];
    if (k == 0) k = p.size();
    if (p.size() != k || k == 0) parse_fail(lineno, "inconsistent probability vector length");
    labels.push_back(rec["label"].get<int>());
    for (const auto& v : p) {
      if (!v.is_number()) parse_fail(lineno, "non-numeric probability");
      probs.push_back(v.get<double>());
    }
  }
  if (labels.empty()) throw Error(ErrorCode::kParseError, "no data rows");
  return make_dataset(std::move(labels), std::move(probs), k);
}

}  // namespace

Dataset parse_classification(const std::string& text, InputFormat format) {
  return format == InputFormat::kCsv ? parse_csv(text) : parse_jsonl(text);
}

Dataset ingest_classification(const std::string& path, InputFormat format) {
  return parse_classification(read_file(path), format);
}

namespace {

double num_field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw Error(ErrorCode::kParseError, where + ": missing numeric '" + key + "'");
  }
  return obj[key].get<double>();
}

Box parse_box(const Json& obj, std::size_t image, bool with_score, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorCode::kParseError, where + ": expected an object");
  Box b;
  b.x = num_field(obj, "x", where);
  b.y = num_field(obj, "y", where);
  b.w = num_field(obj, "w", where);
  b.h = num_field(obj, "h", where);
  if (!obj.contains("class") || !obj["class"].is_number_integer()) {
    throw Error(ErrorCode::kParseError, where + ": missing integer 'class'");
  }
  b.cls = obj["class"].get<int>();
  b.image = image;
  b.score = with_score ? num_field(obj, "score", where) : 1.0;
  validate_box(b);
  return b;
}

}  // namespace

DetectionSet parse_detections(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  if (!doc.is_object() || !doc.contains("images") || !doc["images"].is_array()) {
    throw Error(ErrorCode::kParseError, "expected {\"images\": [...]}");
  }
  DetectionSet set;
  std::set<std::size_t> ids;
  for (std::size_t i = 0; i < doc["images"].size(); ++i) {
    const Json& img = doc["images"][i];
    const std::string where = "images[" + std::to_string(i) + "]";
    if (!img.is_object() || !img.contains("id") || !img["id"].is_number_unsigned()) {
      throw Error(ErrorCode::kParseError, where + ": missing non-negative integer 'id'");
    }
    DetectionImage out;
    out.id = img["id"].get<std::size_t>();
    if (!ids.insert(out.id).second) throw Error(ErrorCode::kParseError, where + ": duplicate id");
    out.width = num_field(img, "width", where);
    out.height = num_field(img, "height", where);
    if (!(out.width > 0.0 && out.height > 0.0)) {
      throw Error(ErrorCode::kNegativeExtent, where + ": image size must be positive");
    }
    for (const char* key : {"detections", "ground_truth"}) {
      if (!img.contains(key)) continue;
      if (!img[key].is_array()) throw Error(ErrorCode::kParseError, where + ": '" + key + "' must be an array");
      const bool dets = std::string(key) == "detections";
      for (std::size_t j = 0; j < img[key].size(); ++j) {
        const Box b = parse_box(img[key][j], out.id, dets,
                                where + "." + key + "[" + std::to_string(j) + "]");
        (dets ? out.detections : out.ground_truth).push_back(b);
      }
    }
    set.images.push_back(std::move(out));
  }
  return set;
}

DetectionSet ingest_detections(const std::string& path) { return parse_detections(read_file(path)); }

std::string emit_detections(const DetectionSet& set) {
  Json doc;
  doc["images"] = Json::array();
  for (const auto& img : set.images) {
    Json j;
    j["id"] = img.id;
    j["width"] = img.width;
    j["height"] = img.height;
    j["detections"] = Json::array();
    j["ground_truth"] = Json::array();
    for (const auto& b : img.detections) {
      j["detections"].push_back({{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}, {"class", b.cls}, {"score", b.score}});
    }
    for (const auto& b : img.ground_truth) {
      j["ground_truth"].push_back({{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}, {"class", b.cls}});
    }
    doc["images"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

namespace {

struct Context {
  const RunConfig& config;
  std::uint64_t seed = 0;
  std::map<std::size_t, ImageSize> image_sizes;
};

using ViewFn = std::function<MetricResult(const BinaryView&, const Context&)>;
using DataFn = std::function<MetricResult(const Dataset&, const Context&)>;
using DetFn = std::function<MetricResult(const MatchedSet&, const Context&)>;

struct Entry {
  MetricInfo info;
  DataFn data;  // classification
  DetFn det;    // detection
};

BinaryView choose_view(const Dataset& ds, ViewChoice v) {
  if (v == ViewChoice::kNativeBinary) {
    if (ds.k() != 2) throw Error(ErrorCode::kWrongClassCount, "native-binary view needs K = 2");
    return native_binary_view(ds);
  }
  return top_label_view(ds);
}

// Evaluates a binary metric on the configured view; the classwise view
// averages the one-vs-rest values.
MetricResult on_view(const Dataset& ds, const Context& ctx, const ViewFn& fn) {
  if (ctx.config.view != ViewChoice::kClasswise) return fn(choose_view(ds, ctx.config.view), ctx);
  MetricResult first;
  double total = 0.0;
  for (std::size_t k = 0; k < ds.k(); ++k) {
    MetricResult r = fn(ovr_view(ds, k), ctx);
    if (k == 0) first = r;
    total += r.value;
  }
  first.value = total / static_cast<double>(ds.k());
  first.p_value.reset();
  first.details.clear();
  first.bins.clear();
  first.details["classes"] = static_cast<double>(ds.k());
  return first;
}

BinningSpec cfg_bins(const Context& ctx, BinScheme scheme) {
  BinningSpec s = ctx.config.binning;
  s.scheme = scheme;
  return s;
}

MetricResult renamed(MetricResult r, const std::string& name) {
  r.name = name;
  return r;
}

std::vector<Entry> build_registry() {
  std::vector<Entry> reg;
  auto data = [&reg](std::string name, DataFn fn, bool stochastic = false, bool binning = false) {
    const std::string n = name;
    reg.push_back({{std::move(name), Task::kClassify, stochastic, binning, false},
                   [fn, n](const Dataset& ds, const Context& ctx) { return renamed(fn(ds, ctx), n); },
                   {}});
  };
  auto view = [&reg](std::string name, ViewFn fn, bool stochastic = false, bool binning = false) {
    const std::string n = name;
    reg.push_back({{std::move(name), Task::kClassify, stochastic, binning, true},
                   [fn, n](const Dataset& ds, const Context& ctx) {
                     return renamed(on_view(ds, ctx, fn), n);
                   },
                   {}});
  };
  auto det = [&reg](std::string name, DetFn fn) {
    const std::string n = name;
    reg.push_back({{std::move(name), Task::kDetect, false, false, false},
                   {},
                   [fn, n](const MatchedSet& m, const Context& ctx) { return renamed(fn(m, ctx), n); }});
  };

  // Point metrics.
  data("brier", [](const Dataset& d, const Context&) { return brier(d); });
  data("rbs", [](const Dataset& d, const Context&) { return rbs(d); });
  view("nll", [](const BinaryView& v, const Context&) { return nll(v); });
  data("focal", [](const Dataset& d, const Context&) { return focal_loss(d); });
  data("success_rate", [](const Dataset& d, const Context&) { return success_rate(d); });
  data("rps", [](const Dataset& d, const Context&) { return rps(d, RpsKind::kRps); });
  data("sarps", [](const Dataset& d, const Context&) { return rps(d, RpsKind::kSarps); });
  data("pseudo_spherical", [](const Dataset& d, const Context&) {
    return alpha_score(d, 2.0, AlphaKind::kPseudoSpherical);
  });
  data("gsb", [](const Dataset& d, const Context&) { return global_bias(d, GlobalBiasKind::kGsb); });
  data("mdca", [](const Dataset& d, const Context&) { return global_bias(d, GlobalBiasKind::kMdca); });
  view("eo", [](const BinaryView& v, const Context&) { return global_bias(v, GlobalBiasKind::kEo); });
  view("oe", [](const BinaryView& v, const Context&) { return global_bias(v, GlobalBiasKind::kOe); });
  view("ecd", [](const BinaryView& v, const Context&) { return ecd(v, 1e-6); });
  view("dss", [](const BinaryView& v, const Context&) {
    return normalized_square(v, NormalizedSquareKind::kDss, 1e-6);
  });
  view("nses", [](const BinaryView& v, const Context&) {
    return normalized_square(v, NormalizedSquareKind::kNses, 1e-6);
  });
  view("mae", [](const BinaryView& v, const Context&) { return pnorm_error(v, 1.0); });
  view("l1eps", [](const BinaryView& v, const Context&) { return l1eps(v); });
  view("hinge", [](const BinaryView& v, const Context&) { return hinge(v); });
  view("spiegelhalter_z", [](const BinaryView& v, const Context&) { return spiegelhalter_z(v); });
  view("soft_f1", [](const BinaryView& v, const Context&) { return soft_f1(v); });

  // Bin metrics.
  view("ece", [](const BinaryView& v, const Context& c) { return binned_ce(v, c.config.binning, 1.0); },
       false, true);
  view("ece_ew", [](const BinaryView& v, const Context& c) {
    return binned_ce(v, cfg_bins(c, BinScheme::kEqualWidth), 1.0);
  }, false, true);
  view("ece_em", [](const BinaryView& v, const Context& c) {
    return binned_ce(v, cfg_bins(c, BinScheme::kEqualMass), 1.0);
  }, false, true);
  view("mce", [](const BinaryView& v, const Context& c) { return binned_ce(v, c.config.binning, kInf); },
       false, true);
  view("ce2", [](const BinaryView& v, const Context& c) { return binned_ce(v, c.config.binning, 2.0); },
       false, true);
  view("ece_sweep", [](const BinaryView& v, const Context& c) {
    return binned_ce(v, cfg_bins(c, BinScheme::kSweep), 1.0);
  });
  data("cwce", [](const Dataset& d, const Context& c) { return classwise_ce(d, c.config.binning); },
       false, true);
  data("wsece", [](const Dataset& d, const Context& c) {
    return classwise_ce(d, c.config.binning, 1.0, ClassWeighting::kProportional);
  }, false, true);
  data("wsmcs", [](const Dataset& d, const Context& c) { return wsmcs(d, c.config.binning); }, false, true);
  data("tace", [](const Dataset& d, const Context& c) { return tace(d, c.config.binning.bins); },
       false, true);
  data("ice", [](const Dataset& d, const Context& c) {
    return ice_imbalanced(top_label_view(d), c.config.binning, d.class_proportions());
  }, false, true);
  view("rbece", [](const BinaryView& v, const Context& c) { return rbece(v, c.config.binning); },
       false, true);
  view("ece_lb", [](const BinaryView& v, const Context& c) { return ece_lb(v, c.config.binning); },
       false, true);
  view("esce", [](const BinaryView& v, const Context& c) { return esce(v, c.config.binning); },
       false, true);
  view("sbece", [](const BinaryView& v, const Context& c) {
    return soft_binned_ece(v, c.config.binning.bins, 1e-3, 1.0, SoftBinKind::kSbece);
  }, false, true);
  view("dece", [](const BinaryView& v, const Context& c) {
    return soft_binned_ece(v, c.config.binning.bins, 1e-3, 1.0, SoftBinKind::kDece);
  }, false, true);
  view("ce2_db", [](const BinaryView& v, const Context& c) {
    return debiased_ce(v, c.config.binning, DebiasKind::kCe2Db);
  }, false, true);
  view("ece_db", [](const BinaryView& v, const Context& c) {
    return debiased_ce(v, c.config.binning, DebiasKind::kEceDb, {1000, c.seed});
  }, true, true);
  view("dpe", [](const BinaryView& v, const Context& c) {
    return debiased_ce(v, c.config.binning, DebiasKind::kDpe);
  }, false, true);
  view("hl", [](const BinaryView& v, const Context& c) { return hl_statistic(v, c.config.binning); },
       false, true);
  view("tcal", [](const BinaryView& v, const Context& c) { return tcal(v, {0.05, 1000, c.seed}); }, true);
  view("sice", [](const BinaryView& v, const Context& c) { return sice(v, 0.01, 100, c.seed); }, true);
  view("calbin", [](const BinaryView& v, const Context&) { return overlapping_ce(v, OverlapKind::kCalBin); });
  view("knn_ce", [](const BinaryView& v, const Context&) {
    // Neighbourhood of a tenth of the points, as for the CalBin window.
    const std::size_t k = std::max<std::size_t>(1, std::min(v.size() / 10, v.size() - 1));
    return overlapping_ce(v, OverlapKind::kKnn, k);
  });
  data("hcs", [](const Dataset& d, const Context& c) { return hcs(d, c.config.binning); }, false, true);
  data("wcr", [](const Dataset& d, const Context&) { return wcr(d); });
  data("cal_measure", [](const Dataset& d, const Context&) { return cal_measure(d); });

  // Kernel and curve metrics.
  view("msce", [](const BinaryView& v, const Context&) { return msce(v); });
  view("sece", [](const BinaryView& v, const Context&) { return sece(v); });
  view("smece", [](const BinaryView& v, const Context&) { return smece(v); });
  data("bkde", [](const Dataset& d, const Context&) { return kde_ce(d, KdeKind::kBeta); });
  data("dkde", [](const Dataset& d, const Context&) { return kde_ce(d, KdeKind::kDirichlet); });
  view("mmce", [](const BinaryView& v, const Context&) { return pairwise_kernel_ce(v, PairwiseKind::kMmce); });
  view("lkce", [](const BinaryView& v, const Context&) { return pairwise_kernel_ce(v, PairwiseKind::kLkce); });
  data("skce_b", [](const Dataset& d, const Context&) { return pairwise_kernel_ce(d, PairwiseKind::kSkceB); });
  data("skce_uq", [](const Dataset& d, const Context&) { return pairwise_kernel_ce(d, PairwiseKind::kSkceUq); });
  data("skce_ul", [](const Dataset& d, const Context&) { return pairwise_kernel_ce(d, PairwiseKind::kSkceUl); });
  view("skde", [](const BinaryView& v, const Context&) { return skde(v); });
  view("smooth_ce", [](const BinaryView& v, const Context&) { return smooth_ce(v); });
  view("lsece", [](const BinaryView& v, const Context& c) { return lsece(v, 0.1, 0, c.seed); }, true);
  for (std::size_t q = 0; q < 4; ++q) {
    static const char* kNames[] = {"ici", "e50", "e90", "emax"};
    view(kNames[q], [q](const BinaryView& v, const Context&) { return loess_metrics(v)[q]; });
  }
  data("eci", [](const Dataset& d, const Context&) { return eci(d); });
  view("ece_pl", [](const BinaryView& v, const Context& c) {
    FottOptions o;
    o.seed = c.seed;
    return fott_fit(v, o).metric;
  }, true);
  view("ece_pl3", [](const BinaryView& v, const Context& c) {
    FottOptions o;
    o.family = FottFamily::kPl3;
    o.seed = c.seed;
    return fott_fit(v, o).metric;
  }, true);
  view("cox_intercept", [](const BinaryView& v, const Context&) { return cox_intercept_slope(v).intercept; });
  view("cox_slope", [](const BinaryView& v, const Context&) { return cox_intercept_slope(v).slope; });
  view("sbct", [](const BinaryView& v, const Context&) { return sbct(v); });
  view("pws", [](const BinaryView& v, const Context&) { return pws(v); });

  // Cumulative metrics.
  view("ecce_mad", [](const BinaryView& v, const Context&) { return ecce(v, EcceKind::kMad); });
  view("ecce_r", [](const BinaryView& v, const Context&) { return ecce(v, EcceKind::kRange); });
  data("ks_top2", [](const Dataset& d, const Context&) { return ks_top_r(d, 2); });

  // Detection metrics.
  det("ace", [](const MatchedSet& m, const Context&) {
    DetBinnedOptions o;
    o.kind = DetBinnedKind::kAce;
    return det_binned(m, o);
  });
  det("laece", [](const MatchedSet& m, const Context&) {
    DetBinnedOptions o;
    o.kind = DetBinnedKind::kLaece;
    return det_binned(m, o);
  });
  det("laece0", [](const MatchedSet& m, const Context&) {
    DetBinnedOptions o;
    o.kind = DetBinnedKind::kLaece0;
    return det_binned(m, o);
  });
  det("dece", [](const MatchedSet& m, const Context& c) {
    DetBinnedOptions o;
    o.kind = DetBinnedKind::kDece;
    o.bins = 5;
    o.dims = {DetDim::kScore, DetDim::kX, DetDim::kY, DetDim::kW, DetDim::kH};
    o.image_sizes = c.image_sizes;
    return det_binned(m, o);
  });
  det("laace0", [](const MatchedSet& m, const Context&) { return laace0(m); });
  det("l1cbod", [](const MatchedSet& m, const Context&) { return l1cbod(m); });
  det("egce", [](const MatchedSet& m, const Context&) { return global_det(m, GlobalDetKind::kEgce); });
  det("qgc", [](const MatchedSet& m, const Context&) { return global_det(m, GlobalDetKind::kQgc); });
  det("sgc", [](const MatchedSet& m, const Context&) { return global_det(m, GlobalDetKind::kSgc); });
  det("qgc_mean", [](const MatchedSet& m, const Context&) {
    return renamed(global_det(m, GlobalDetKind::kQgc, true), "qgc_mean");
  });
  det("sgc_mean", [](const MatchedSet& m, const Context&) {
    return renamed(global_det(m, GlobalDetKind::kSgc, true), "sgc_mean");
  });
  return reg;
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> reg = build_registry();
  return reg;
}

const Entry& find_entry(const std::string& name, Task task) {
  for (const auto& e : entries()) {
    if (e.info.name == name && e.info.task == task) return e;
  }
  throw Error(ErrorCode::kConfigError, "unknown metric '" + name + "'");
}

}  // namespace

const std::vector<MetricInfo>& registry() {
  static const std::vector<MetricInfo> infos = [] {
    std::vector<MetricInfo> out;
    for (const auto& e : entries()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

std::vector<std::string> suite_metrics(const std::string& suite, Task task) {
  if (task == Task::kDetect) {
    if (suite == "classic" || suite == "detect") return {"ace", "laece0", "laace0", "egce", "qgc", "sgc"};
    if (suite == "all") {
      std::vector<std::string> out;
      for (const auto& e : entries()) {
        if (e.info.task == Task::kDetect) out.push_back(e.info.name);
      }
      return out;
    }
    throw Error(ErrorCode::kConfigError, "unknown detection suite '" + suite + "'");
  }
  if (suite == "classic") return {"brier", "nll", "ece_ew", "ece_em", "mce", "ecce_mad"};
  if (suite == "point") {
    return {"brier", "rbs", "nll", "focal", "ecd", "gsb", "mae", "spiegelhalter_z", "rps"};
  }
  if (suite == "binned") return {"ece", "mce", "ce2", "cwce", "tace", "ece_lb", "esce", "ce2_db", "hl"};
  if (suite == "kernel") return {"msce", "smece", "mmce", "skce_uq", "skde", "smooth_ce", "ici", "sbct", "pws"};
  if (suite == "cumulative") return {"ecce_mad", "ecce_r"};
  throw Error(ErrorCode::kConfigError, "unknown suite '" + suite + "'");
}

std::vector<std::string> resolve_metrics(const RunConfig& config) {
  std::vector<std::string> names = config.metrics;
  if (!config.suite.empty()) {
    const auto s = suite_metrics(config.suite, config.task);
    names.insert(names.end(), s.begin(), s.end());
  }
  if (names.empty()) names = suite_metrics("classic", config.task);
  std::vector<std::string> unique;
  for (const auto& n : names) {
    if (std::find(unique.begin(), unique.end(), n) == unique.end()) unique.push_back(n);
  }
  bool stochastic = config.bootstrap > 0 || config.consistency > 0;
  for (const auto& n : unique) stochastic = stochastic || find_entry(n, config.task).info.stochastic;
  if (stochastic && !config.seed) {
    throw Error(ErrorCode::kConfigError, "a seed is required for stochastic metrics or resampling");
  }
  if (config.bootstrap > 0 && config.consistency > 0) {
    throw Error(ErrorCode::kConfigError, "choose one of bootstrap or consistency resampling");
  }
  if (config.task == Task::kDetect && (config.bootstrap > 0 || config.consistency > 0)) {
    throw Error(ErrorCode::kConfigError, "resampling is not supported for detection metrics");
  }
  if (config.binning.scheme == BinScheme::kSliding || config.binning.scheme == BinScheme::kKnn ||
      config.binning.scheme == BinScheme::kProximityGrid) {
    throw Error(ErrorCode::kConfigError, "binning scheme is not available from the command line");
  }
  if (config.binning.bins < 1) throw Error(ErrorCode::kConfigError, "bins must be >= 1");
  return unique;
}

namespace {

Json real(double v) {
  if (std::isfinite(v)) return v;
  return format_real(v);
}

Json result_json(const MetricResult& r, Json params) {
  Json j;
  j["name"] = r.name;
  j["value"] = real(r.value);
  j["range"] = Json::array({real(r.range.lo), real(r.range.hi)});
  j["orientation"] = OrientationName(r.orientation);
  if (r.p_value) j["p_value"] = real(*r.p_value);
  if (r.ci) j["ci"] = Json::array({real(r.ci->lo), real(r.ci->hi)});
  j["params"] = std::move(params);
  if (!r.details.empty()) {
    Json d = Json::object();
    for (const auto& [k, v] : r.details) d[k] = real(v);
    j["details"] = std::move(d);
  }
  return j;
}

Json params_json(const MetricInfo& info, const Context& ctx) {
  Json p = Json::object();
  if (info.uses_view) p["view"] = ViewChoiceName(ctx.config.view);
  if (info.uses_binning) {
    p["binning"] = BinSchemeName(ctx.config.binning.scheme);
    p["bins"] = ctx.config.binning.bins;
  }
  if (info.stochastic || ctx.config.bootstrap || ctx.config.consistency) p["seed"] = ctx.seed;
  if (ctx.config.bootstrap) p["bootstrap"] = ctx.config.bootstrap;
  if (ctx.config.consistency) p["consistency"] = ctx.config.consistency;
  return p;
}

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_real(v.get<double>());
  return v.dump();
}

std::string render(const Json& report, OutFormat fmt) {
  if (fmt == OutFormat::kJson) return report.dump(2) + "\n";
  std::ostringstream out;
  out << "name,value,range_lo,range_hi,orientation,p_value,ci_lo,ci_hi,error\n";
  for (const auto& m : report["metrics"]) {
    out << m["name"].get<std::string>() << ',';
    if (m.contains("error")) {
      out << ",,,,,,," << m["error"]["code"].get<std::string>() << '\n';
      continue;
    }
    out << csv_cell(m["value"]) << ',' << csv_cell(m["range"][0]) << ',' << csv_cell(m["range"][1])
        << ',' << m["orientation"].get<std::string>() << ','
        << (m.contains("p_value") ? csv_cell(m["p_value"]) : "") << ','
        << (m.contains("ci") ? csv_cell(m["ci"][0]) : "") << ','
        << (m.contains("ci") ? csv_cell(m["ci"][1]) : "") << ",\n";
  }
  return out.str();
}

Json error_json(const std::string& name, const Error& e) {
  Json j;
  j["name"] = name;
  j["error"] = {{"code", ErrorCodeName(e.code())}, {"message", e.what()}};
  return j;
}

Json diagrams_json(const Dataset& ds, const RunConfig& config) {
  Json d = Json::object();
  const BinaryView v = config.view == ViewChoice::kNativeBinary ? choose_view(ds, config.view)
                                                                 : top_label_view(ds);
  try {
    const DiagramTable t = reliability_table(v, config.binning, DiagramStyle::kTiltedRoof);
    Json rel;
    rel["scheme"] = t.scheme;
    rel["bins"] = t.bins;
    rel["n"] = t.n;
    rel["rows"] = Json::array();
    for (const auto& r : t.rows) {
      Json row;
      row["bin"] = r.bin;
      row["count"] = r.count;
      row["lo"] = real(r.lo);
      row["hi"] = real(r.hi);
      if (r.has_marker) {
        row["mean_conf"] = real(r.mean_conf);
        row["mean_outcome"] = real(r.mean_outcome);
        row["std_error"] = real(r.std_error);
        row["roof"] = Json::array({real(r.roof_lo), real(r.roof_hi)});
      }
      rel["rows"].push_back(std::move(row));
    }
    d["reliability"] = std::move(rel);
  } catch (const Error& e) {
    d["reliability"] = {{"error", ErrorCodeName(e.code())}};
  }
  try {
    const BrierCurve bc = brier_curve(v, 100);
    Json curve;
    curve["cost"] = Json::array();
    curve["brier"] = Json::array();
    curve["cost_curve"] = Json::array();
    for (std::size_t g = 0; g < bc.cost.size(); ++g) {
      curve["cost"].push_back(real(bc.cost[g]));
      curve["brier"].push_back(real(bc.brier[g]));
      curve["cost_curve"].push_back(real(bc.cost_curve[g]));
    }
    curve["area"] = real(bc.area);
    d["brier_curve"] = std::move(curve);
  } catch (const Error& e) {
    d["brier_curve"] = {{"error", ErrorCodeName(e.code())}};
  }
  if (ds.k() == 3) {
    const SimplexTable s = simplex_table(ds);
    Json simplex;
    simplex["depth"] = s.depth;
    simplex["rows"] = Json::array();
    for (const auto& r : s.rows) {
      Json row;
      row["cell"] = r.cell;
      row["count"] = r.count;
      row["tail"] = Json::array();
      row["head"] = Json::array();
      for (double x : r.tail) row["tail"].push_back(real(x));
      for (double x : r.head) row["head"].push_back(real(x));
      simplex["rows"].push_back(std::move(row));
    }
    d["simplex"] = std::move(simplex);
  }
  return d;
}

}  // namespace

Report run_classification(const RunConfig& config, const Dataset& ds) {
  const auto names = resolve_metrics(config);
  if (config.view == ViewChoice::kNativeBinary && ds.k() != 2) {
    throw Error(ErrorCode::kConfigError, "native-binary view needs a two-class input");
  }
  if (config.consistency > 0 && ds.k() != 2) {
    throw Error(ErrorCode::kConfigError, "consistency resampling needs a two-class input");
  }
  Context ctx{config, config.seed.value_or(0), {}};
  Json report;
  report["schema_version"] = 1;
  Json dataset;
  dataset["task"] = "classify";
  dataset["n"] = ds.n();
  dataset["k"] = ds.k();
  dataset["view"] = ViewChoiceName(config.view);
  dataset["class_proportions"] = Json::array();
  for (double p : ds.class_proportions()) dataset["class_proportions"].push_back(real(p));
  report["dataset"] = std::move(dataset);
  report["metrics"] = Json::array();
  int exit_code = 0;
  for (const auto& name : names) {
    const Entry& e = find_entry(name, Task::kClassify);
    try {
      MetricResult r;
      if (config.bootstrap || config.consistency) {
        ResampleSpec spec;
        spec.kind = config.bootstrap ? ResampleKind::kBootstrap : ResampleKind::kConsistency;
        spec.rounds = config.bootstrap ? config.bootstrap : config.consistency;
        spec.seed = ctx.seed;
        spec.ci_level = config.ci_level;
        DatasetMetric fn = [&e, &ctx](const Dataset& d) { return e.data(d, ctx); };
        r = resample_ci(fn, ds, spec);
      } else {
        r = e.data(ds, ctx);
      }
      report["metrics"].push_back(result_json(r, params_json(e.info, ctx)));
    } catch (const Error& err) {
      report["metrics"].push_back(error_json(name, err));
      exit_code = 2;
    }
  }
  if (config.diagrams) report["diagrams"] = diagrams_json(ds, config);
  return {render(report, config.out_format), exit_code};
}

Report run_detection(const RunConfig& config, const DetectionSet& set) {
  const auto names = resolve_metrics(config);
  Context ctx{config, config.seed.value_or(0), {}};
  std::vector<Box> dets, gts;
  for (const auto& img : set.images) {
    ctx.image_sizes[img.id] = {img.width, img.height};
    dets.insert(dets.end(), img.detections.begin(), img.detections.end());
    gts.insert(gts.end(), img.ground_truth.begin(), img.ground_truth.end());
  }
  const MatchedSet matched = match(dets, gts, config.iou_threshold, true);
  Json report;
  report["schema_version"] = 1;
  Json dataset;
  dataset["task"] = "detect";
  dataset["images"] = set.images.size();
  dataset["detections"] = dets.size();
  dataset["ground_truth"] = gts.size();
  dataset["tp"] = matched.tp_count();
  dataset["fp"] = matched.fp_count();
  dataset["fn"] = matched.fn_count();
  dataset["iou_threshold"] = real(config.iou_threshold);
  report["dataset"] = std::move(dataset);
  report["metrics"] = Json::array();
  int exit_code = 0;
  for (const auto& name : names) {
    const Entry& e = find_entry(name, Task::kDetect);
    try {
      report["metrics"].push_back(result_json(e.det(matched, ctx), params_json(e.info, ctx)));
    } catch (const Error& err) {
      report["metrics"].push_back(error_json(name, err));
      exit_code = 2;
    }
  }
  return {render(report, config.out_format), exit_code};
}

Report run_suite(const RunConfig& config) {
  if (config.input.empty()) throw Error(ErrorCode::kConfigError, "no input file given");
  if (config.task == Task::kDetect) return run_detection(config, ingest_detections(config.input));
  return run_classification(config, ingest_classification(config.input, config.format));
}

}  // namespace calmet::cli

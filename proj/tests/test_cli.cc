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

#include <string>

#include "doctest.h"

#include "calmet/cli.h"
#include "json.hpp"

using namespace calmet;
using namespace calmet::cli;
using doctest::Approx;
using Json = nlohmann::ordered_json;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kInvalidArgument;
}

const char* kBinaryCsv =
    "label,confidence\n"
    "0,0.2\n1,0.3\n1,0.8\n1,0.9\n0,0.1\n1,0.7\n0,0.4\n1,0.6\n1,0.95\n0,0.35\n";

const char* kDetections = R"({"images": [
  {"id": 0, "width": 10, "height": 10,
   "detections": [{"x": 0, "y": 0, "w": 2, "h": 2, "class": 0, "score": 0.8},
                  {"x": 5, "y": 5, "w": 1, "h": 1, "class": 0, "score": 0.3}],
   "ground_truth": [{"x": 0, "y": 0, "w": 2, "h": 2, "class": 0}]}
]})";

RunConfig config(std::vector<std::string> metrics) {
  RunConfig c;
  c.metrics = std::move(metrics);
  c.binning = BinningSpec::EqualWidth(2);
  return c;
}

const Json* find(const Json& report, const std::string& name) {
  for (const auto& m : report["metrics"]) {
    if (m["name"] == name) return &m;
  }
  return nullptr;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("csv and jsonl input") {
    const Dataset bin = parse_classification(kBinaryCsv, InputFormat::kCsv);
    CHECK(bin.n() == 10);
    CHECK(bin.k() == 2);
    CHECK(bin.prob(2, 1) == Approx(0.8));
    const Dataset three = parse_classification("label,p0,p1,p2\n2,0.1,0.2,0.7\n0,0.5,0.25,0.25\n",
                                               InputFormat::kCsv);
    CHECK(three.k() == 3);
    CHECK(three.label(0) == 2);
    const Dataset js = parse_classification(
        "{\"label\": 1, \"probs\": [0.4, 0.6]}\n{\"label\": 0, \"probs\": [0.9, 0.1]}\n",
        InputFormat::kJsonl);
    CHECK(js.n() == 2);
    CHECK(js.prob(0, 1) == Approx(0.6));
    try {
      parse_classification("label,confidence\n0,0.2\n1,abc\n", InputFormat::kCsv);
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParseError);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK(code_of([] { parse_classification("label,p0,p1\n0,0.7,0.7\n", InputFormat::kCsv); }) ==
          ErrorCode::kNonStochasticRow);
  }

  TEST_CASE("suites and seeding rules") {
    CHECK(suite_metrics("classic", Task::kClassify) ==
          std::vector<std::string>{"brier", "nll", "ece_ew", "ece_em", "mce", "ecce_mad"});
    CHECK(code_of([] { suite_metrics("nope", Task::kClassify); }) == ErrorCode::kConfigError);
    CHECK(code_of([] { resolve_metrics(config({"sice"})); }) == ErrorCode::kConfigError);
    CHECK(code_of([] { resolve_metrics(config({"not_a_metric"})); }) == ErrorCode::kConfigError);
    RunConfig boot = config({"ece"});
    boot.bootstrap = 100;
    CHECK(code_of([&] { resolve_metrics(boot); }) == ErrorCode::kConfigError);
    boot.seed = 3;
    CHECK(resolve_metrics(boot) == std::vector<std::string>{"ece"});
    for (const auto& info : registry()) CHECK_FALSE(info.name.empty());
  }

  TEST_CASE("json report") {
    const Dataset ds = parse_classification("label,confidence\n0,0.2\n1,0.3\n1,0.8\n1,0.9\n",
                                            InputFormat::kCsv);
    RunConfig c = config({"ece", "mce", "brier"});
    c.view = ViewChoice::kNativeBinary;
    const Report r = run_classification(c, ds);
    CHECK(r.exit_code == 0);
    const Json doc = Json::parse(r.text);
    CHECK(doc["schema_version"] == 1);
    REQUIRE(find(doc, "ece") != nullptr);
    CHECK((*find(doc, "ece"))["value"].get<double>() == Approx(0.2));
    CHECK((*find(doc, "mce"))["value"].get<double>() == Approx(0.25));
    CHECK((*find(doc, "ece"))["orientation"] == "zero-is-perfect");
  }

  TEST_CASE("reports are byte-identical") {
    const Dataset ds = parse_classification(kBinaryCsv, InputFormat::kCsv);
    RunConfig c;
    c.suite = "classic";
    c.seed = 11;
    c.bootstrap = 50;
    c.diagrams = true;
    const std::string a = run_classification(c, ds).text;
    CHECK(a == run_classification(c, ds).text);
    c.out_format = OutFormat::kCsv;
    CHECK(run_classification(c, ds).text == run_classification(c, ds).text);
  }

  TEST_CASE("metric failures set the exit code") {
    const Dataset ds = parse_classification(kBinaryCsv, InputFormat::kCsv);
    RunConfig c = config({"ks_top2", "brier"});
    const Report r = run_classification(c, ds);
    CHECK(r.exit_code == 2);
    const Json doc = Json::parse(r.text);
    CHECK((*find(doc, "ks_top2")).contains("error"));
    CHECK((*find(doc, "brier")).contains("value"));
  }

  TEST_CASE("detection round trip") {
    const DetectionSet set = parse_detections(kDetections);
    REQUIRE(set.images.size() == 1);
    CHECK(set.images[0].detections.size() == 2);
    const std::string again = emit_detections(set);
    CHECK(emit_detections(parse_detections(again)) == again);
    RunConfig c = config({"qgc", "laace0"});
    c.task = Task::kDetect;
    const Json doc = Json::parse(run_detection(c, set).text);
    CHECK((*find(doc, "qgc"))["value"].get<double>() == Approx(0.13));
    CHECK(code_of([] { parse_detections("{\"images\": [{\"id\": 0}]}"); }) == ErrorCode::kParseError);
  }

  TEST_CASE("real formatting") {
    CHECK(format_real(0.1) == "0.1");
    CHECK(format_real(kInf) == "inf");
    CHECK(format_real(-kInf) == "-inf");
    CHECK(format_real(std::nan("")) == "nan");
  }
}

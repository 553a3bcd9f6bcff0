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

// calmet: compute calibration metrics for prediction files.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "calmet/cli.h"

namespace {

std::uint64_t parse_seed(const std::string& s, const char* source) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used, 10);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw calmet::Error(calmet::ErrorCode::kConfigError,
                        std::string("invalid seed in ") + source + ": '" + s + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace calmet;
  CLI::App app{"Probability calibration metrics for classifiers and object detectors"};
  std::string format = "csv", task = "classify", view = "top-label", binning = "equal-width";
  std::string out_format = "json", seed;
  std::vector<std::string> metrics;
  cli::RunConfig config;
  bool list = false;
  app.add_option("--input", config.input, "Prediction file (CSV, JSONL or detection JSON)");
  app.add_option("--format", format, "Classification input format: csv | jsonl");
  app.add_option("--task", task, "classify | detect");
  app.add_option("--metrics", metrics, "Comma-separated metric names")->delimiter(',');
  app.add_option("--suite", config.suite, "Named metric suite (classic, point, binned, kernel, cumulative, all)");
  app.add_option("--view", view, "top-label | classwise | native-binary");
  app.add_option("--bins", config.binning.bins, "Number of bins");
  app.add_option("--binning", binning, "equal-width | equal-mass | equal-area | sweep | mvms");
  app.add_option("--seed", seed, "Seed for stochastic metrics and resampling (falls back to CALMET_SEED)");
  app.add_option("--bootstrap", config.bootstrap, "Bootstrap rounds for percentile intervals");
  app.add_option("--consistency", config.consistency, "Consistency-resampling rounds");
  app.add_option("--ci-level", config.ci_level, "Interval coverage");
  app.add_option("--iou", config.iou_threshold, "IOU threshold for detection matching");
  app.add_option("--out", config.out, "Output file (default: stdout)");
  app.add_option("--out-format", out_format, "json | csv");
  app.add_flag("--diagrams", config.diagrams, "Include diagram tables in the JSON report");
  app.add_flag("--list-metrics", list, "Print the metric registry and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  if (list) {
    for (const auto& m : cli::registry()) {
      std::cout << m.name << '\t' << (m.task == cli::Task::kClassify ? "classify" : "detect")
                << (m.stochastic ? "\tstochastic" : "") << '\n';
    }
    return 0;
  }
  try {
    config.format = cli::ParseInputFormat(format);
    config.task = cli::ParseTask(task);
    config.view = cli::ParseViewChoice(view);
    config.out_format = cli::ParseOutFormat(out_format);
    config.binning.scheme = ParseBinScheme(binning);
    config.metrics = metrics;
    if (!seed.empty()) {
      config.seed = parse_seed(seed, "--seed");
    } else if (const char* env = std::getenv("CALMET_SEED"); env && *env) {
      config.seed = parse_seed(env, "CALMET_SEED");
    }
    const cli::Report report = cli::run_suite(config);
    if (config.out.empty()) {
      std::cout << report.text;
    } else {
      std::ofstream out(config.out, std::ios::binary);
      if (!out) throw Error(ErrorCode::kConfigError, "cannot write '" + config.out + "'");
      out << report.text;
    }
    return report.exit_code;
  } catch (const Error& e) {
    std::cerr << "calmet: " << e.what() << '\n';
    return 1;
  }
}

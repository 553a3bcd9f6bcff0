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

// Command-line plumbing: input parsers, the metric registry, suite execution
// and report serialisation. The executable in tools/ is a thin flag layer.

#ifndef CALMET_CLI_H_
#define CALMET_CLI_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "calmet/binning.h"
#include "calmet/core.h"
#include "calmet/objdet.h"

namespace calmet::cli {

enum class InputFormat { kCsv, kJsonl };
enum class Task { kClassify, kDetect };
enum class ViewChoice { kTopLabel, kClasswise, kNativeBinary };
enum class OutFormat { kJson, kCsv };

InputFormat ParseInputFormat(const std::string& s);
Task ParseTask(const std::string& s);
ViewChoice ParseViewChoice(const std::string& s);
OutFormat ParseOutFormat(const std::string& s);
const char* ViewChoiceName(ViewChoice v);

// CSV: header `label,p0,...,p{K-1}` or `label,confidence` (binary shorthand);
// JSONL: one {"label": int, "probs": [...]} object per line.
Dataset parse_classification(const std::string& text, InputFormat format);
Dataset ingest_classification(const std::string& path, InputFormat format);

struct DetectionImage {
  std::size_t id = 0;
  double width = 1.0;
  double height = 1.0;
  std::vector<Box> detections;
  std::vector<Box> ground_truth;
};

struct DetectionSet {
  std::vector<DetectionImage> images;
};

DetectionSet parse_detections(const std::string& text);
DetectionSet ingest_detections(const std::string& path);
std::string emit_detections(const DetectionSet& set);

struct RunConfig {
  std::string input;
  InputFormat format = InputFormat::kCsv;
  Task task = Task::kClassify;
  std::vector<std::string> metrics;
  std::string suite;
  BinningSpec binning;
  std::optional<std::uint64_t> seed;
  std::size_t bootstrap = 0;    // rounds; 0 disables
  std::size_t consistency = 0;  // rounds; 0 disables
  double ci_level = 0.95;
  std::string out;  // empty: stdout
  OutFormat out_format = OutFormat::kJson;
  ViewChoice view = ViewChoice::kTopLabel;
  bool diagrams = false;
  double iou_threshold = 0.5;  // detection matching
};

struct MetricInfo {
  std::string name;
  Task task;
  bool stochastic = false;
  bool uses_binning = false;
  bool uses_view = false;
};

const std::vector<MetricInfo>& registry();
// Metric names of a named suite; throws ConfigError for unknown suites.
std::vector<std::string> suite_metrics(const std::string& suite, Task task);

// Resolves the metric list and checks names and seeding rules; throws
// ConfigError on violations.
std::vector<std::string> resolve_metrics(const RunConfig& config);

struct Report {
  std::string text;  // serialised in the configured format
  int exit_code = 0;  // 0 success, 2 when any metric failed
};

Report run_classification(const RunConfig& config, const Dataset& ds);
Report run_detection(const RunConfig& config, const DetectionSet& set);
// Reads the input named by the config and dispatches on the task.
Report run_suite(const RunConfig& config);

// Shortest round-trip decimal form; "inf", "-inf" and "nan" otherwise.
std::string format_real(double v);

}  // namespace calmet::cli

#endif  // CALMET_CLI_H_

// Copyright 2026 The shiftbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Evaluation runs over (method, dataset) cells and their rendered tables.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shiftbench/aggregation.hpp"
#include "shiftbench/classification_metrics.hpp"
#include "shiftbench/records.hpp"
#include "shiftbench/regression_metrics.hpp"

namespace shiftbench {

enum class Task { Classification, Regression, Both };

Task parse_task(std::string_view name);
const char* to_string(Task t) noexcept;

enum class ReportFormat { Markdown, Csv };

ReportFormat parse_report_format(std::string_view name);

struct EvaluationConfig {
  Task task = Task::Both;
  std::size_t bins = kDefaultCalibrationBins;
  std::size_t levels = kDefaultCalibrationLevels;
  std::size_t threads = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EvaluationCell {
  std::string method;
  std::string dataset;
  std::optional<ClassificationReport> classification;
  std::optional<std::string> classification_absent;
  std::optional<RegressionReport> regression;
  std::optional<std::string> regression_absent;

  friend bool operator==(const EvaluationCell&, const EvaluationCell&) = default;
};

struct RunMetadata {
  std::uint64_t seed = 0;
  std::string version;
  std::size_t n_predictions = 0;
  std::size_t n_skipped_ood = 0;
  std::size_t n_probability_clamped = 0;
  std::size_t n_sigma_floored = 0;
  std::size_t n_excluded_degenerate = 0;

  friend bool operator==(const RunMetadata&, const RunMetadata&) = default;
};

struct EvaluationRun {
  Task task = Task::Both;
  std::vector<std::string> methods;   // display order
  std::vector<std::string> datasets;  // display order
  std::vector<EvaluationCell> cells;  // methods x datasets, method-major
  RunMetadata metadata;

  const EvaluationCell* find(std::string_view method, std::string_view dataset) const;
  friend bool operator==(const EvaluationRun&, const EvaluationRun&) = default;
};

// Canonical ordering: known tags first in table order, others alphabetical.
std::vector<std::string> order_datasets(std::vector<std::string> tags);
std::vector<std::string> order_methods(std::vector<std::string> tags);
std::string dataset_label(std::string_view tag);

EvaluationRun evaluate(std::span<const AggregatedPrediction> agg, std::span<const GroundTruthRecord> gt,
                       const EvaluationConfig& config = {});
EvaluationRun evaluate_predictions(std::vector<PredictionRecord> predictions,
                                   std::span<const GroundTruthRecord> gt, const EvaluationConfig& config = {});

std::string render_report(const EvaluationRun& run, ReportFormat format);

// One parsed row of the CSV report; cells hold the rendered text.
struct ReportCsvRow {
  std::string table;
  std::string metric;
  std::string method;
  std::vector<std::string> cells;
};

struct ReportCsv {
  std::vector<std::string> datasets;
  std::vector<ReportCsvRow> rows;
};

ReportCsv parse_report_csv(std::string_view text);

// Full-precision sidecar.
std::string to_json(const EvaluationRun& run);
EvaluationRun parse_run(std::string_view text);

// Reliability bins of every classification cell, optionally one method or dataset.
std::string reliability_csv(const EvaluationRun& run, std::string_view method = {}, std::string_view dataset = {});
// Pooled and per-coordinate calibration levels of every regression cell.
std::string calibration_csv(const EvaluationRun& run, std::string_view method = {}, std::string_view dataset = {});

}  // namespace shiftbench

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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shiftbench/records.hpp"

namespace shiftbench {

// Predictive distribution of one (image, method) pair, approximated from its
// T dropout passes or M ensemble members by plain averaging:
//   p(y | x) ~= (1/T) sum_t p(y | x, theta_t)
// Box uncertainty is the per-coordinate population variance (divide by T)
// across passes; a single pass therefore has zero variance.
struct AggregatedPrediction {
  std::string image_id;
  std::string method;
  std::size_t pass_count = 0;

  std::optional<std::vector<double>> mean_probs;
  std::optional<int> predicted_class;   // argmax, ties to the lowest index
  std::optional<double> confidence;     // max of mean_probs
  std::optional<std::vector<double>> class_prob_variance;  // diagnostic, not scored

  std::optional<std::array<double, 4>> mean_box;
  std::optional<std::array<double, 4>> box_variance;  // pixels^2

  // False when the averaged corners do not form a box (x1 >= x2 or y1 >= y2).
  bool has_valid_mean_box() const noexcept;
};

struct ClassificationAggregate {
  std::vector<double> mean_probs;
  std::vector<double> prob_variance;
  int predicted_class = 0;
  double confidence = 0.0;
};

struct RegressionAggregate {
  std::array<double, 4> mean_box{};
  std::array<double, 4> box_variance{};
};

// Throw ValidationError if any record lacks class_probs / box respectively.
ClassificationAggregate aggregate_classification(const SampleSet& s);
RegressionAggregate aggregate_regression(const SampleSet& s);

// Aggregates whichever heads are present on every record. Records must agree:
// a head present on some passes but not others is a ValidationError.
AggregatedPrediction aggregate(const SampleSet& s);

// Order of the output follows `sets`; deterministic for any thread count.
std::vector<AggregatedPrediction> aggregate_all(std::span<const SampleSet> sets, std::size_t threads = 1);

// Argmax with ties broken towards the lowest index.
std::size_t argmax_lowest(std::span<const double> p) noexcept;

std::string to_json_line(const AggregatedPrediction& a);
std::vector<AggregatedPrediction> parse_aggregated(std::string_view text, std::size_t threads = 1);

}  // namespace shiftbench

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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "shiftbench/aggregation.hpp"
#include "shiftbench/records.hpp"

namespace shiftbench {

inline constexpr std::size_t kDefaultCalibrationBins = 10;
// Lower clamp applied to the true-class probability before taking -log.
inline constexpr double kProbabilityFloor = 1e-12;

// Bin b covers [b/B, (b+1)/B); the last bin is closed at 1.
struct ReliabilityBin {
  double lo = 0.0;
  double hi = 0.0;
  double mean_confidence = 0.0;  // 0 for empty bins
  double accuracy = 0.0;         // 0 for empty bins
  std::size_t count = 0;

  friend bool operator==(const ReliabilityBin&, const ReliabilityBin&) = default;
};

struct CalibrationResult {
  double ece = 0.0;
  std::vector<ReliabilityBin> bins;
};

struct ClassificationReport {
  double accuracy = 0.0;
  double ece = 0.0;
  double nll = 0.0;
  double brier = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_skipped_ood = 0;
  std::size_t n_probability_clamped = 0;
  double probability_floor = kProbabilityFloor;
  std::vector<ReliabilityBin> bins;

  friend bool operator==(const ClassificationReport&, const ClassificationReport&) = default;
};

// Predictions joined with labels, flattened. OoD-sentinel labels are skipped
// and counted, never scored.
struct ClassificationSamples {
  std::vector<double> confidence;
  std::vector<std::uint8_t> correct;
  std::vector<double> true_class_prob;
  std::vector<double> brier_term;  // sum_c (p_c - onehot_c)^2 per sample
  std::size_t skipped_ood = 0;

  std::size_t size() const noexcept { return confidence.size(); }
};

// Throws ValidationError for a missing label, a prediction without
// mean_probs, or a class-count mismatch.
ClassificationSamples join_classification(std::span<const AggregatedPrediction> agg,
                                          const GroundTruthIndex& gt);

// Binned calibration error  (1/N) sum_b n_b |acc_b - conf_b|.
// Throws ValidationError("empty evaluation set") when N = 0 or bins = 0.
CalibrationResult calibration_error(std::span<const double> confidence,
                                    std::span<const std::uint8_t> correct,
                                    std::size_t bins = kDefaultCalibrationBins);

// Bin index of a confidence value with the edge convention above.
std::size_t reliability_bin(double confidence, std::size_t bins) noexcept;

double accuracy(std::span<const AggregatedPrediction> agg, const GroundTruthIndex& gt);
CalibrationResult ece_classification(std::span<const AggregatedPrediction> agg, const GroundTruthIndex& gt,
                                     std::size_t bins = kDefaultCalibrationBins);
double nll_classification(std::span<const AggregatedPrediction> agg, const GroundTruthIndex& gt);
double brier(std::span<const AggregatedPrediction> agg, const GroundTruthIndex& gt);

ClassificationReport evaluate_classification(const ClassificationSamples& samples,
                                             std::size_t bins = kDefaultCalibrationBins);
ClassificationReport evaluate_classification(std::span<const AggregatedPrediction> agg,
                                             const GroundTruthIndex& gt,
                                             std::size_t bins = kDefaultCalibrationBins);

}  // namespace shiftbench

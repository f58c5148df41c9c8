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
#include <vector>

#include "shiftbench/aggregation.hpp"
#include "shiftbench/records.hpp"

namespace shiftbench {

inline constexpr std::size_t kDefaultCalibrationLevels = 10;
// Predicted standard deviations below this are raised to it (pixels).
inline constexpr double kSigmaFloor = 1e-6;

// Box-regression scoring under a per-coordinate Gaussian N(mean, sigma^2),
// sigma^2 being the aggregated pass variance.
//
//   NLL = 1/(4N) sum_ij [ 1/2 ln(2 pi sigma_ij^2) + (y^_ij - y_ij)^2 / (2 sigma_ij^2) ]
//
// Calibration follows the quantile formulation: F_ij = Phi(z_ij) with
// z_ij = (y^_ij - y_ij) / sigma_ij, and for each level p_l = l / L
//
//   p_emp,l = |{(i, j) : F_ij <= p_l}| / (4N),   ECE = 1/L sum_l |p_emp,l - p_l|
//
// The comparison F <= p_l is evaluated exactly as z <= t_l, where t_l is the
// largest double with Phi(t_l) <= p_l (see cdf_level_threshold).

struct CalibrationLevel {
  double level = 0.0;
  double empirical_frequency = 0.0;

  friend bool operator==(const CalibrationLevel&, const CalibrationLevel&) = default;
};

struct RegressionCalibration {
  double ece = 0.0;
  std::vector<CalibrationLevel> levels;                       // pooled over coordinates
  std::array<std::vector<CalibrationLevel>, 4> per_coordinate;  // x1, y1, x2, y2
  std::array<double, 4> per_coordinate_ece{};
};

struct RegressionReport {
  double mae = 0.0;
  double mean_iou = 0.0;
  std::optional<double> nll;
  std::optional<double> ece;
  std::optional<double> sharpness;
  std::size_t n_samples = 0;
  std::size_t n_excluded_degenerate = 0;
  std::size_t n_sigma_floored = 0;
  std::vector<CalibrationLevel> levels;
  std::array<std::vector<CalibrationLevel>, 4> coordinate_levels;
  std::array<double, 4> coordinate_ece{};
  // Set when nll / ece / sharpness are absent.
  std::optional<std::string> uncertainty_absent_reason;

  friend bool operator==(const RegressionReport&, const RegressionReport&) = default;
};

// Predictions joined with labels as interleaved (x1, y1, x2, y2) arrays.
// Samples whose mean box is degenerate are excluded and counted.
struct RegressionSamples {
  std::vector<double> pred;
  std::vector<double> truth;
  std::vector<double> sigma;   // floored standard deviation
  std::size_t excluded_degenerate = 0;
  std::size_t sigma_floored = 0;
  bool has_uncertainty = false;  // some pass variance > 0

  std::size_t size() const noexcept { return pred.size() / 4; }
};

// Throws ValidationError for a missing label or a prediction without a box.
RegressionSamples join_regression(std::span<const AggregatedPrediction> agg, const GroundTruthIndex& gt);

double standard_normal_cdf(double z) noexcept;
// Largest double t with standard_normal_cdf(t) <= p; +inf for p >= 1.
double cdf_level_threshold(double p);
// p_l = l / levels for l = 1..levels.
std::vector<double> calibration_levels(std::size_t levels);

// Throw ValidationError("empty evaluation set") when nothing is scorable.
double mae_dataset(std::span<const AggregatedPrediction> agg, const GroundTruthIndex& gt);
double mean_iou(std::span<const AggregatedPrediction> agg, const GroundTruthIndex& gt);
// nullopt when no prediction carries uncertainty (e.g. single-pass methods).
std::optional<double> nll_regression(std::span<const AggregatedPrediction> agg, const GroundTruthIndex& gt);
std::optional<RegressionCalibration> ece_regression(std::span<const AggregatedPrediction> agg,
                                                    const GroundTruthIndex& gt,
                                                    std::size_t levels = kDefaultCalibrationLevels);
// Population variance of the predicted sigma over all coordinates.
std::optional<double> sharpness(std::span<const AggregatedPrediction> agg);

// Same metrics on pre-joined arrays (4 entries per sample).
double gaussian_nll(std::span<const double> pred, std::span<const double> truth, std::span<const double> sigma);
RegressionCalibration regression_calibration(std::span<const double> pred, std::span<const double> truth,
                                             std::span<const double> sigma,
                                             std::size_t levels = kDefaultCalibrationLevels);
double population_variance(std::span<const double> x);

RegressionReport evaluate_regression(const RegressionSamples& samples,
                                     std::size_t levels = kDefaultCalibrationLevels);
RegressionReport evaluate_regression(std::span<const AggregatedPrediction> agg, const GroundTruthIndex& gt,
                                     std::size_t levels = kDefaultCalibrationLevels);

}  // namespace shiftbench

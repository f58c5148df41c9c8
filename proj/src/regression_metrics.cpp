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

#include "shiftbench/regression_metrics.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "shiftbench/error.hpp"
#include "shiftbench/kernels.hpp"

namespace shiftbench {
namespace {

constexpr char kNoUncertainty[] = "no predictive uncertainty (all box variances are zero)";

void require_nonempty(std::size_t n) {
  if (n == 0) throw ValidationError("empty evaluation set");
}

// Monotone map from doubles (excluding NaN) to unsigned integers.
std::uint64_t order_key(double d) {
  const auto u = std::bit_cast<std::uint64_t>(d);
  constexpr std::uint64_t sign = 1ULL << 63;
  return (u & sign) ? ~u : (u | sign);
}

double from_order_key(std::uint64_t k) {
  constexpr std::uint64_t sign = 1ULL << 63;
  return std::bit_cast<double>((k & sign) ? (k & ~sign) : ~k);
}

}  // namespace

double standard_normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z * (0.5 * std::numbers::sqrt2)); }

double cdf_level_threshold(double p) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (p >= 1.0) return inf;
  if (!(p > 0.0)) throw ValidationError("calibration level must be in (0, 1]");
  // Invariant: cdf(lo) <= p < cdf(hi).
  std::uint64_t lo = order_key(-inf);
  std::uint64_t hi = order_key(inf);
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (standard_normal_cdf(from_order_key(mid)) <= p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return from_order_key(lo);
}

std::vector<double> calibration_levels(std::size_t levels) {
  if (levels == 0) throw ValidationError("level count must be >= 1");
  std::vector<double> out(levels);
  for (std::size_t l = 0; l < levels; ++l) out[l] = static_cast<double>(l + 1) / static_cast<double>(levels);
  return out;
}

RegressionSamples join_regression(std::span<const AggregatedPrediction> agg, const GroundTruthIndex& gt) {
  RegressionSamples s;
  s.pred.reserve(agg.size() * 4);
  s.truth.reserve(agg.size() * 4);
  s.sigma.reserve(agg.size() * 4);
  for (const AggregatedPrediction& a : agg) {
    const GroundTruthRecord& truth = gt.at(a.image_id);
    if (!a.mean_box) {
      throw ValidationError("prediction for image '" + a.image_id + "', method '" + a.method + "' has no box");
    }
    if (!a.has_valid_mean_box()) {
      ++s.excluded_degenerate;
      continue;
    }
    const std::array<double, 4> var = a.box_variance.value_or(std::array<double, 4>{});
    for (std::size_t j = 0; j < 4; ++j) {
      s.pred.push_back((*a.mean_box)[j]);
      s.truth.push_back(truth.box.corners()[j]);
      if (var[j] > 0.0) s.has_uncertainty = true;
      double sd = std::sqrt(var[j]);
      if (sd < kSigmaFloor) {
        sd = kSigmaFloor;
        ++s.sigma_floored;
      }
      s.sigma.push_back(sd);
    }
  }
  return s;
}

double gaussian_nll(std::span<const double> pred, std::span<const double> truth, std::span<const double> sigma) {
  require_nonempty(pred.size());
  const kernels::ResidualStats st = kernels::active_kernels().residual_stats(pred, truth, sigma, {});
  std::vector<double> log_var(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) log_var[i] = std::log(sigma[i] * sigma[i]);
  const double n = static_cast<double>(pred.size());
  const double mean_log_var = kernels::active_kernels().sum(log_var).total() / n;
  const double mean_sq = st.sq_standardized.total() / n;
  return 0.5 * std::log(2.0 * std::numbers::pi) + 0.5 * mean_log_var + 0.5 * mean_sq;
}

RegressionCalibration regression_calibration(std::span<const double> pred, std::span<const double> truth,
                                             std::span<const double> sigma, std::size_t levels) {
  require_nonempty(pred.size());
  const std::vector<double> p = calibration_levels(levels);
  std::vector<double> thresholds(levels);
  for (std::size_t l = 0; l < levels; ++l) thresholds[l] = cdf_level_threshold(p[l]);

  const kernels::ResidualStats st = kernels::active_kernels().residual_stats(pred, truth, sigma, thresholds);
  const double total = static_cast<double>(pred.size());
  // pred.size() is a multiple of 4, so every lane (coordinate) holds total/4 entries.
  const double per_coord = total / 4.0;

  RegressionCalibration out;
  out.levels.resize(levels);
  for (auto& v : out.per_coordinate) v.resize(levels);
  double gap = 0.0;
  std::array<double, 4> coord_gap{};
  for (std::size_t l = 0; l < levels; ++l) {
    std::uint64_t pooled = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      const std::uint64_t c = st.counts[l * kernels::kLanes + j];
      pooled += c;
      const double f = static_cast<double>(c) / per_coord;
      out.per_coordinate[j][l] = {p[l], f};
      coord_gap[j] += std::abs(f - p[l]);
    }
    const double f = static_cast<double>(pooled) / total;
    out.levels[l] = {p[l], f};
    gap += std::abs(f - p[l]);
  }
  out.ece = gap / static_cast<double>(levels);
  for (std::size_t j = 0; j < 4; ++j) out.per_coordinate_ece[j] = coord_gap[j] / static_cast<double>(levels);
  return out;
}

double population_variance(std::span<const double> x) {
  require_nonempty(x.size());
  const auto& k = kernels::active_kernels();
  const double n = static_cast<double>(x.size());
  const double mean = k.sum(x).total() / n;
  return k.sq_dev_sum(x, mean).total() / n;
}

RegressionReport evaluate_regression(const RegressionSamples& s, std::size_t levels) {
  require_nonempty(s.size());
  const auto& k = kernels::active_kernels();
  RegressionReport r;
  r.n_samples = s.size();
  r.n_excluded_degenerate = s.excluded_degenerate;
  r.mae = k.residual_stats(s.pred, s.truth, s.sigma, {}).abs_residual.total() / static_cast<double>(s.pred.size());
  r.mean_iou = k.iou_sum(s.pred, s.truth).total() / static_cast<double>(s.size());
  if (!s.has_uncertainty) {
    r.uncertainty_absent_reason = kNoUncertainty;
    return r;
  }
  r.n_sigma_floored = s.sigma_floored;
  r.nll = gaussian_nll(s.pred, s.truth, s.sigma);
  RegressionCalibration cal = regression_calibration(s.pred, s.truth, s.sigma, levels);
  r.ece = cal.ece;
  r.levels = std::move(cal.levels);
  r.coordinate_levels = std::move(cal.per_coordinate);
  r.coordinate_ece = cal.per_coordinate_ece;
  r.sharpness = population_variance(s.sigma);
  return r;
}

RegressionReport evaluate_regression(std::span<const AggregatedPrediction> agg, const GroundTruthIndex& gt,
                                     std::size_t levels) {
  return evaluate_regression(join_regression(agg, gt), levels);
}

double mae_dataset(std::span<const AggregatedPrediction> agg, const GroundTruthIndex& gt) {
  const RegressionSamples s = join_regression(agg, gt);
  require_nonempty(s.size());
  return kernels::active_kernels().residual_stats(s.pred, s.truth, s.sigma, {}).abs_residual.total() /
         static_cast<double>(s.pred.size());
}

double mean_iou(std::span<const AggregatedPrediction> agg, const GroundTruthIndex& gt) {
  const RegressionSamples s = join_regression(agg, gt);
  require_nonempty(s.size());
  return kernels::active_kernels().iou_sum(s.pred, s.truth).total() / static_cast<double>(s.size());
}

std::optional<double> nll_regression(std::span<const AggregatedPrediction> agg, const GroundTruthIndex& gt) {
  const RegressionSamples s = join_regression(agg, gt);
  require_nonempty(s.size());
  if (!s.has_uncertainty) return std::nullopt;
  return gaussian_nll(s.pred, s.truth, s.sigma);
}

std::optional<RegressionCalibration> ece_regression(std::span<const AggregatedPrediction> agg,
                                                    const GroundTruthIndex& gt, std::size_t levels) {
  const RegressionSamples s = join_regression(agg, gt);
  require_nonempty(s.size());
  if (!s.has_uncertainty) return std::nullopt;
  return regression_calibration(s.pred, s.truth, s.sigma, levels);
}

std::optional<double> sharpness(std::span<const AggregatedPrediction> agg) {
  std::vector<double> sigma;
  bool any = false;
  for (const AggregatedPrediction& a : agg) {
    if (!a.has_valid_mean_box()) continue;
    const std::array<double, 4> var = a.box_variance.value_or(std::array<double, 4>{});
    for (double v : var) {
      any = any || v > 0.0;
      sigma.push_back(std::max(std::sqrt(v), kSigmaFloor));
    }
  }
  if (!any) return std::nullopt;
  return population_variance(sigma);
}

}  // namespace shiftbench

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

#include <cmath>

#include "kernels/variants.hpp"

namespace shiftbench::kernels {
namespace {

void pass_moments_scalar(std::span<const double> rows, std::size_t passes, std::size_t width,
                         std::span<double> mean, std::span<double> var) {
  const double n = static_cast<double>(passes);
  for (std::size_t d = 0; d < width; ++d) {
    const double first = rows[d];
    double shift = 0.0;
    for (std::size_t t = 0; t < passes; ++t) shift += rows[t * width + d] - first;
    const double m = first + shift / n;
    double ss = 0.0;
    for (std::size_t t = 0; t < passes; ++t) {
      const double e = rows[t * width + d] - m;
      ss += e * e;
    }
    mean[d] = m;
    var[d] = ss / n;
  }
}

LaneSums sum_scalar(std::span<const double> x) {
  LaneSums s;
  for (std::size_t i = 0; i < x.size(); ++i) s.lanes[i % kLanes] += x[i];
  return s;
}

LaneSums sq_dev_sum_scalar(std::span<const double> x, double center) {
  LaneSums s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = x[i] - center;
    s.lanes[i % kLanes] += e * e;
  }
  return s;
}

// Same operand selection as the x86 min/max instructions.
double vmin(double a, double b) { return a < b ? a : b; }
double vmax(double a, double b) { return a > b ? a : b; }
double positive_part(double v) { return v > 0.0 ? v : 0.0; }

LaneSums iou_sum_scalar(std::span<const double> pred, std::span<const double> truth) {
  LaneSums s;
  const std::size_t boxes = pred.size() / 4;
  for (std::size_t i = 0; i < boxes; ++i) {
    const double* a = pred.data() + 4 * i;
    const double* b = truth.data() + 4 * i;
    const double iw = positive_part(vmin(a[2], b[2]) - vmax(a[0], b[0]));
    const double ih = positive_part(vmin(a[3], b[3]) - vmax(a[1], b[1]));
    const double inter = iw * ih;
    const double area_a = (a[2] - a[0]) * (a[3] - a[1]);
    const double area_b = (b[2] - b[0]) * (b[3] - b[1]);
    const double uni = area_a + area_b - inter;
    s.lanes[i % kLanes] += inter / uni;
  }
  return s;
}

ResidualStats residual_stats_scalar(std::span<const double> pred, std::span<const double> truth,
                                    std::span<const double> sigma,
                                    std::span<const double> thresholds) {
  ResidualStats st;
  st.counts.assign(thresholds.size() * kLanes, 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const std::size_t lane = i % kLanes;
    const double r = pred[i] - truth[i];
    const double z = r / sigma[i];
    st.abs_residual.lanes[lane] += std::abs(r);
    st.sq_standardized.lanes[lane] += z * z;
    for (std::size_t l = 0; l < thresholds.size(); ++l) {
      if (z <= thresholds[l]) ++st.counts[l * kLanes + lane];
    }
  }
  return st;
}

float clamp_round(float v) {
  v = v > 0.0f ? v : 0.0f;
  v = v < 255.0f ? v : 255.0f;
  return std::nearbyint(v);
}

void blend_toward_scalar(std::span<const std::uint8_t> in, std::span<const float> alpha,
                         float gray, std::span<std::uint8_t> out) {
  for (std::size_t i = 0; i < in.size(); ++i) {
    const float a = alpha[i];
    const float v = (1.0f - a) * static_cast<float>(in[i]) + a * gray;
    out[i] = static_cast<std::uint8_t>(clamp_round(v));
  }
}

void add_saturate_scalar(std::span<const std::uint8_t> in, std::span<const float> delta,
                         std::span<std::uint8_t> out) {
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(clamp_round(static_cast<float>(in[i]) + delta[i]));
  }
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{
      "scalar",          pass_moments_scalar,   sum_scalar,          sq_dev_sum_scalar,
      iou_sum_scalar,    residual_stats_scalar, blend_toward_scalar, add_saturate_scalar,
  };
  return table;
}

}  // namespace shiftbench::kernels

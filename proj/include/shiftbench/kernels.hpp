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

// Data-parallel inner loops behind the metric, aggregation, and image code.
//
// Every kernel exists as a scalar reference plus optional SIMD variants. All
// variants are required to be bit-identical to the scalar reference: double
// reductions accumulate into four interleaved lanes (element i goes to lane
// i % 4) and the lanes are combined as (l0 + l1) + (l2 + l3). The build
// disables floating-point contraction so no variant picks up FMA rounding.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace shiftbench::kernels {

inline constexpr std::size_t kLanes = 4;

struct LaneSums {
  std::array<double, kLanes> lanes{};

  double total() const noexcept { return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]); }
  LaneSums& operator+=(const LaneSums& o) noexcept {
    for (std::size_t k = 0; k < kLanes; ++k) lanes[k] += o.lanes[k];
    return *this;
  }
};

// Result of the standardized-residual pass over interleaved box coordinates.
struct ResidualStats {
  LaneSums abs_residual;       // sum |pred - truth|
  LaneSums sq_standardized;    // sum ((pred - truth) / sigma)^2
  // counts[l * 4 + j]: coordinate j entries with z <= thresholds[l].
  std::vector<std::uint64_t> counts;
};

struct KernelTable {
  std::string_view name;

  // rows is passes x width, row-major. For every column d:
  //   mean[d] = x[0][d] + sum_t (x[t][d] - x[0][d]) / passes
  //   var[d]  = sum_t (x[t][d] - mean[d])^2 / passes
  // Rows are consumed in the given order.
  void (*pass_moments)(std::span<const double> rows, std::size_t passes, std::size_t width,
                       std::span<double> mean, std::span<double> var);

  LaneSums (*sum)(std::span<const double> x);

  // sum (x_i - center)^2
  LaneSums (*sq_dev_sum)(std::span<const double> x, double center);

  // Interleaved (x1, y1, x2, y2) boxes; returns the sum of per-pair IoU,
  // lane k holding boxes with index % 4 == k.
  LaneSums (*iou_sum)(std::span<const double> pred, std::span<const double> truth);

  // Interleaved coordinates (4 per box, so lane == coordinate). z is
  // (pred - truth) / sigma and compared inclusively against each threshold.
  ResidualStats (*residual_stats)(std::span<const double> pred, std::span<const double> truth,
                                  std::span<const double> sigma,
                                  std::span<const double> thresholds);

  // out = round_half_even(clamp((1 - a) * in + a * gray, 0, 255)) in float.
  void (*blend_toward)(std::span<const std::uint8_t> in, std::span<const float> alpha, float gray,
                       std::span<std::uint8_t> out);

  // out = round_half_even(clamp(in + delta, 0, 255)) in float.
  void (*add_saturate)(std::span<const std::uint8_t> in, std::span<const float> delta,
                       std::span<std::uint8_t> out);
};

const KernelTable& scalar_kernels() noexcept;

// Every variant compiled in and supported by the running CPU, scalar first.
std::vector<const KernelTable*> available_kernels();

// Best supported variant. The SHIFTBENCH_KERNELS environment variable
// ("scalar", "avx2", "neon") forces a choice when that variant is available.
const KernelTable& active_kernels();

// Overrides the active variant for the rest of the process (tests, CLI flag).
// Returns false when `name` is not available.
bool select_kernels(std::string_view name);

}  // namespace shiftbench::kernels

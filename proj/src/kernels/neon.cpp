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

// NEON variants for AArch64. A 4-lane double accumulator is carried as two
// float64x2 registers (lanes 0-1 and 2-3).

#include <arm_neon.h>

#include <cmath>

#include "kernels/variants.hpp"

namespace shiftbench::kernels {
namespace {

// Operand selection matching the scalar reference, including signed zeros.
inline float64x2_t sel_min(float64x2_t a, float64x2_t b) { return vbslq_f64(vcltq_f64(a, b), a, b); }
inline float64x2_t sel_max(float64x2_t a, float64x2_t b) { return vbslq_f64(vcgtq_f64(a, b), a, b); }

void pass_moments_neon(std::span<const double> rows, std::size_t passes, std::size_t width,
                       std::span<double> mean, std::span<double> var) {
  const double n = static_cast<double>(passes);
  const float64x2_t vn = vdupq_n_f64(n);
  std::size_t d = 0;
  for (; d + 2 <= width; d += 2) {
    const float64x2_t first = vld1q_f64(rows.data() + d);
    float64x2_t shift = vdupq_n_f64(0.0);
    for (std::size_t t = 0; t < passes; ++t) {
      shift = vaddq_f64(shift, vsubq_f64(vld1q_f64(rows.data() + t * width + d), first));
    }
    const float64x2_t m = vaddq_f64(first, vdivq_f64(shift, vn));
    float64x2_t ss = vdupq_n_f64(0.0);
    for (std::size_t t = 0; t < passes; ++t) {
      const float64x2_t e = vsubq_f64(vld1q_f64(rows.data() + t * width + d), m);
      ss = vaddq_f64(ss, vmulq_f64(e, e));
    }
    vst1q_f64(mean.data() + d, m);
    vst1q_f64(var.data() + d, vdivq_f64(ss, vn));
  }
  for (; d < width; ++d) {
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

LaneSums to_lanes(float64x2_t lo, float64x2_t hi) {
  LaneSums s;
  vst1q_f64(s.lanes.data(), lo);
  vst1q_f64(s.lanes.data() + 2, hi);
  return s;
}

LaneSums sum_neon(std::span<const double> x) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= x.size(); i += 4) {
    lo = vaddq_f64(lo, vld1q_f64(x.data() + i));
    hi = vaddq_f64(hi, vld1q_f64(x.data() + i + 2));
  }
  LaneSums s = to_lanes(lo, hi);
  for (std::size_t k = 0; i < x.size(); ++i, ++k) s.lanes[k] += x[i];
  return s;
}

LaneSums sq_dev_sum_neon(std::span<const double> x, double center) {
  const float64x2_t c = vdupq_n_f64(center);
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= x.size(); i += 4) {
    const float64x2_t e0 = vsubq_f64(vld1q_f64(x.data() + i), c);
    const float64x2_t e1 = vsubq_f64(vld1q_f64(x.data() + i + 2), c);
    lo = vaddq_f64(lo, vmulq_f64(e0, e0));
    hi = vaddq_f64(hi, vmulq_f64(e1, e1));
  }
  LaneSums s = to_lanes(lo, hi);
  for (std::size_t k = 0; i < x.size(); ++i, ++k) {
    const double e = x[i] - center;
    s.lanes[k] += e * e;
  }
  return s;
}

// IoU of two interleaved box pairs.
inline float64x2_t iou2(const double* a, const double* b) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2x4_t pa = vld4q_f64(a);
  const float64x2x4_t pb = vld4q_f64(b);
  const float64x2_t iw = sel_max(vsubq_f64(sel_min(pa.val[2], pb.val[2]), sel_max(pa.val[0], pb.val[0])), zero);
  const float64x2_t ih = sel_max(vsubq_f64(sel_min(pa.val[3], pb.val[3]), sel_max(pa.val[1], pb.val[1])), zero);
  const float64x2_t inter = vmulq_f64(iw, ih);
  const float64x2_t area_a = vmulq_f64(vsubq_f64(pa.val[2], pa.val[0]), vsubq_f64(pa.val[3], pa.val[1]));
  const float64x2_t area_b = vmulq_f64(vsubq_f64(pb.val[2], pb.val[0]), vsubq_f64(pb.val[3], pb.val[1]));
  const float64x2_t uni = vsubq_f64(vaddq_f64(area_a, area_b), inter);
  return vdivq_f64(inter, uni);
}

LaneSums iou_sum_neon(std::span<const double> pred, std::span<const double> truth) {
  const std::size_t boxes = pred.size() / 4;
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= boxes; i += 4) {
    lo = vaddq_f64(lo, iou2(pred.data() + 4 * i, truth.data() + 4 * i));
    hi = vaddq_f64(hi, iou2(pred.data() + 4 * i + 8, truth.data() + 4 * i + 8));
  }
  LaneSums s = to_lanes(lo, hi);
  for (std::size_t k = 0; i < boxes; ++i, ++k) {
    const double* a = pred.data() + 4 * i;
    const double* b = truth.data() + 4 * i;
    auto vmin = [](double u, double v) { return u < v ? u : v; };
    auto vmax = [](double u, double v) { return u > v ? u : v; };
    const double iw = vmax(vmin(a[2], b[2]) - vmax(a[0], b[0]), 0.0);
    const double ih = vmax(vmin(a[3], b[3]) - vmax(a[1], b[1]), 0.0);
    const double inter = iw * ih;
    const double uni = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter;
    s.lanes[k] += inter / uni;
  }
  return s;
}

ResidualStats residual_stats_neon(std::span<const double> pred, std::span<const double> truth,
                                  std::span<const double> sigma,
                                  std::span<const double> thresholds) {
  const std::size_t levels = thresholds.size();
  std::vector<uint64x2_t> cnt_lo(levels, vdupq_n_u64(0)), cnt_hi(levels, vdupq_n_u64(0));
  float64x2_t abs_lo = vdupq_n_f64(0.0), abs_hi = vdupq_n_f64(0.0);
  float64x2_t sq_lo = vdupq_n_f64(0.0), sq_hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= pred.size(); i += 4) {
    const float64x2_t r0 = vsubq_f64(vld1q_f64(pred.data() + i), vld1q_f64(truth.data() + i));
    const float64x2_t r1 = vsubq_f64(vld1q_f64(pred.data() + i + 2), vld1q_f64(truth.data() + i + 2));
    const float64x2_t z0 = vdivq_f64(r0, vld1q_f64(sigma.data() + i));
    const float64x2_t z1 = vdivq_f64(r1, vld1q_f64(sigma.data() + i + 2));
    abs_lo = vaddq_f64(abs_lo, vabsq_f64(r0));
    abs_hi = vaddq_f64(abs_hi, vabsq_f64(r1));
    sq_lo = vaddq_f64(sq_lo, vmulq_f64(z0, z0));
    sq_hi = vaddq_f64(sq_hi, vmulq_f64(z1, z1));
    for (std::size_t l = 0; l < levels; ++l) {
      const float64x2_t t = vdupq_n_f64(thresholds[l]);
      cnt_lo[l] = vsubq_u64(cnt_lo[l], vcleq_f64(z0, t));
      cnt_hi[l] = vsubq_u64(cnt_hi[l], vcleq_f64(z1, t));
    }
  }
  ResidualStats st;
  st.abs_residual = to_lanes(abs_lo, abs_hi);
  st.sq_standardized = to_lanes(sq_lo, sq_hi);
  st.counts.resize(levels * kLanes);
  for (std::size_t l = 0; l < levels; ++l) {
    st.counts[l * kLanes + 0] = vgetq_lane_u64(cnt_lo[l], 0);
    st.counts[l * kLanes + 1] = vgetq_lane_u64(cnt_lo[l], 1);
    st.counts[l * kLanes + 2] = vgetq_lane_u64(cnt_hi[l], 0);
    st.counts[l * kLanes + 3] = vgetq_lane_u64(cnt_hi[l], 1);
  }
  for (std::size_t k = 0; i < pred.size(); ++i, ++k) {
    const double r = pred[i] - truth[i];
    const double z = r / sigma[i];
    st.abs_residual.lanes[k] += std::abs(r);
    st.sq_standardized.lanes[k] += z * z;
    for (std::size_t l = 0; l < levels; ++l) {
      if (z <= thresholds[l]) ++st.counts[l * kLanes + k];
    }
  }
  return st;
}

inline void load_u8x8(const std::uint8_t* p, float32x4_t& lo, float32x4_t& hi) {
  const uint16x8_t w = vmovl_u8(vld1_u8(p));
  lo = vcvtq_f32_u32(vmovl_u16(vget_low_u16(w)));
  hi = vcvtq_f32_u32(vmovl_u16(vget_high_u16(w)));
}

inline uint32x4_t clamp_round4(float32x4_t v) {
  v = vmaxq_f32(v, vdupq_n_f32(0.0f));
  v = vminq_f32(v, vdupq_n_f32(255.0f));
  return vcvtq_u32_f32(vrndnq_f32(v));
}

inline void store_u8x8(std::uint8_t* p, float32x4_t lo, float32x4_t hi) {
  const uint16x8_t w = vcombine_u16(vmovn_u32(clamp_round4(lo)), vmovn_u32(clamp_round4(hi)));
  vst1_u8(p, vmovn_u16(w));
}

float clamp_round(float v) {
  v = v > 0.0f ? v : 0.0f;
  v = v < 255.0f ? v : 255.0f;
  return std::nearbyint(v);
}

void blend_toward_neon(std::span<const std::uint8_t> in, std::span<const float> alpha, float gray,
                       std::span<std::uint8_t> out) {
  const float32x4_t one = vdupq_n_f32(1.0f);
  const float32x4_t g = vdupq_n_f32(gray);
  std::size_t i = 0;
  for (; i + 8 <= in.size(); i += 8) {
    float32x4_t lo, hi;
    load_u8x8(in.data() + i, lo, hi);
    const float32x4_t a0 = vld1q_f32(alpha.data() + i);
    const float32x4_t a1 = vld1q_f32(alpha.data() + i + 4);
    lo = vaddq_f32(vmulq_f32(vsubq_f32(one, a0), lo), vmulq_f32(a0, g));
    hi = vaddq_f32(vmulq_f32(vsubq_f32(one, a1), hi), vmulq_f32(a1, g));
    store_u8x8(out.data() + i, lo, hi);
  }
  for (; i < in.size(); ++i) {
    const float a = alpha[i];
    out[i] = static_cast<std::uint8_t>(clamp_round((1.0f - a) * static_cast<float>(in[i]) + a * gray));
  }
}

void add_saturate_neon(std::span<const std::uint8_t> in, std::span<const float> delta,
                       std::span<std::uint8_t> out) {
  std::size_t i = 0;
  for (; i + 8 <= in.size(); i += 8) {
    float32x4_t lo, hi;
    load_u8x8(in.data() + i, lo, hi);
    lo = vaddq_f32(lo, vld1q_f32(delta.data() + i));
    hi = vaddq_f32(hi, vld1q_f32(delta.data() + i + 4));
    store_u8x8(out.data() + i, lo, hi);
  }
  for (; i < in.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(clamp_round(static_cast<float>(in[i]) + delta[i]));
  }
}

}  // namespace

const KernelTable& neon_kernels() noexcept {
  static const KernelTable table{
      "neon",          pass_moments_neon,   sum_neon,          sq_dev_sum_neon,
      iou_sum_neon,    residual_stats_neon, blend_toward_neon, add_saturate_neon,
  };
  return table;
}

}  // namespace shiftbench::kernels

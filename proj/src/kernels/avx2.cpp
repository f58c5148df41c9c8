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

// AVX2 variants. This translation unit is compiled with -mavx2 and must only
// be entered after a runtime CPU check (see dispatch.cpp).

#include <immintrin.h>

#include <cmath>

#include "kernels/variants.hpp"

namespace shiftbench::kernels {
namespace {

void pass_moments_avx2(std::span<const double> rows, std::size_t passes, std::size_t width,
                       std::span<double> mean, std::span<double> var) {
  const double n = static_cast<double>(passes);
  const __m256d vn = _mm256_set1_pd(n);
  std::size_t d = 0;
  for (; d + 4 <= width; d += 4) {
    const __m256d first = _mm256_loadu_pd(rows.data() + d);
    __m256d shift = _mm256_setzero_pd();
    for (std::size_t t = 0; t < passes; ++t) {
      shift = _mm256_add_pd(shift, _mm256_sub_pd(_mm256_loadu_pd(rows.data() + t * width + d), first));
    }
    const __m256d m = _mm256_add_pd(first, _mm256_div_pd(shift, vn));
    __m256d ss = _mm256_setzero_pd();
    for (std::size_t t = 0; t < passes; ++t) {
      const __m256d e = _mm256_sub_pd(_mm256_loadu_pd(rows.data() + t * width + d), m);
      ss = _mm256_add_pd(ss, _mm256_mul_pd(e, e));
    }
    _mm256_storeu_pd(mean.data() + d, m);
    _mm256_storeu_pd(var.data() + d, _mm256_div_pd(ss, vn));
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

LaneSums to_lanes(__m256d acc) {
  LaneSums s;
  _mm256_storeu_pd(s.lanes.data(), acc);
  return s;
}

LaneSums sum_avx2(std::span<const double> x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= x.size(); i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x.data() + i));
  LaneSums s = to_lanes(acc);
  for (std::size_t k = 0; i < x.size(); ++i, ++k) s.lanes[k] += x[i];
  return s;
}

LaneSums sq_dev_sum_avx2(std::span<const double> x, double center) {
  const __m256d c = _mm256_set1_pd(center);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= x.size(); i += 4) {
    const __m256d e = _mm256_sub_pd(_mm256_loadu_pd(x.data() + i), c);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(e, e));
  }
  LaneSums s = to_lanes(acc);
  for (std::size_t k = 0; i < x.size(); ++i, ++k) {
    const double e = x[i] - center;
    s.lanes[k] += e * e;
  }
  return s;
}

// Loads four interleaved boxes and returns them as x1, y1, x2, y2 columns.
inline void load_boxes(const double* p, __m256d& x1, __m256d& y1, __m256d& x2, __m256d& y2) {
  const __m256d r0 = _mm256_loadu_pd(p);
  const __m256d r1 = _mm256_loadu_pd(p + 4);
  const __m256d r2 = _mm256_loadu_pd(p + 8);
  const __m256d r3 = _mm256_loadu_pd(p + 12);
  const __m256d t0 = _mm256_unpacklo_pd(r0, r1);
  const __m256d t1 = _mm256_unpackhi_pd(r0, r1);
  const __m256d t2 = _mm256_unpacklo_pd(r2, r3);
  const __m256d t3 = _mm256_unpackhi_pd(r2, r3);
  x1 = _mm256_permute2f128_pd(t0, t2, 0x20);
  y1 = _mm256_permute2f128_pd(t1, t3, 0x20);
  x2 = _mm256_permute2f128_pd(t0, t2, 0x31);
  y2 = _mm256_permute2f128_pd(t1, t3, 0x31);
}

LaneSums iou_sum_avx2(std::span<const double> pred, std::span<const double> truth) {
  const std::size_t boxes = pred.size() / 4;
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = zero;
  std::size_t i = 0;
  for (; i + 4 <= boxes; i += 4) {
    __m256d ax1, ay1, ax2, ay2, bx1, by1, bx2, by2;
    load_boxes(pred.data() + 4 * i, ax1, ay1, ax2, ay2);
    load_boxes(truth.data() + 4 * i, bx1, by1, bx2, by2);
    const __m256d iw = _mm256_max_pd(_mm256_sub_pd(_mm256_min_pd(ax2, bx2), _mm256_max_pd(ax1, bx1)), zero);
    const __m256d ih = _mm256_max_pd(_mm256_sub_pd(_mm256_min_pd(ay2, by2), _mm256_max_pd(ay1, by1)), zero);
    const __m256d inter = _mm256_mul_pd(iw, ih);
    const __m256d area_a = _mm256_mul_pd(_mm256_sub_pd(ax2, ax1), _mm256_sub_pd(ay2, ay1));
    const __m256d area_b = _mm256_mul_pd(_mm256_sub_pd(bx2, bx1), _mm256_sub_pd(by2, by1));
    const __m256d uni = _mm256_sub_pd(_mm256_add_pd(area_a, area_b), inter);
    acc = _mm256_add_pd(acc, _mm256_div_pd(inter, uni));
  }
  LaneSums s = to_lanes(acc);
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

ResidualStats residual_stats_avx2(std::span<const double> pred, std::span<const double> truth,
                                  std::span<const double> sigma,
                                  std::span<const double> thresholds) {
  const std::size_t levels = thresholds.size();
  const __m256d sign = _mm256_set1_pd(-0.0);
  struct Lane {
    __m256i count;
    __m256d threshold;
  };
  std::vector<Lane> lv(levels);
  for (std::size_t l = 0; l < levels; ++l) lv[l] = {_mm256_setzero_si256(), _mm256_set1_pd(thresholds[l])};

  __m256d abs_acc = _mm256_setzero_pd();
  __m256d sq_acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= pred.size(); i += 4) {
    const __m256d r = _mm256_sub_pd(_mm256_loadu_pd(pred.data() + i), _mm256_loadu_pd(truth.data() + i));
    const __m256d z = _mm256_div_pd(r, _mm256_loadu_pd(sigma.data() + i));
    abs_acc = _mm256_add_pd(abs_acc, _mm256_andnot_pd(sign, r));
    sq_acc = _mm256_add_pd(sq_acc, _mm256_mul_pd(z, z));
    for (std::size_t l = 0; l < levels; ++l) {
      const __m256i hit = _mm256_castpd_si256(_mm256_cmp_pd(z, lv[l].threshold, _CMP_LE_OQ));
      lv[l].count = _mm256_sub_epi64(lv[l].count, hit);
    }
  }

  ResidualStats st;
  st.abs_residual = to_lanes(abs_acc);
  st.sq_standardized = to_lanes(sq_acc);
  st.counts.resize(levels * kLanes);
  for (std::size_t l = 0; l < levels; ++l) {
    alignas(32) std::uint64_t c[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(c), lv[l].count);
    for (std::size_t k = 0; k < kLanes; ++k) st.counts[l * kLanes + k] = c[k];
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

inline __m256 load_u8x8(const std::uint8_t* p) {
  const __m128i bytes = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(p));
  return _mm256_cvtepi32_ps(_mm256_cvtepu8_epi32(bytes));
}

inline void store_u8x8(std::uint8_t* p, __m256 v) {
  v = _mm256_max_ps(v, _mm256_setzero_ps());
  v = _mm256_min_ps(v, _mm256_set1_ps(255.0f));
  v = _mm256_round_ps(v, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256i i32 = _mm256_cvtps_epi32(v);
  const __m128i p16 = _mm_packus_epi32(_mm256_castsi256_si128(i32), _mm256_extracti128_si256(i32, 1));
  _mm_storel_epi64(reinterpret_cast<__m128i*>(p), _mm_packus_epi16(p16, p16));
}

float clamp_round(float v) {
  v = v > 0.0f ? v : 0.0f;
  v = v < 255.0f ? v : 255.0f;
  return std::nearbyint(v);
}

void blend_toward_avx2(std::span<const std::uint8_t> in, std::span<const float> alpha, float gray,
                       std::span<std::uint8_t> out) {
  const __m256 one = _mm256_set1_ps(1.0f);
  const __m256 g = _mm256_set1_ps(gray);
  std::size_t i = 0;
  for (; i + 8 <= in.size(); i += 8) {
    const __m256 a = _mm256_loadu_ps(alpha.data() + i);
    const __m256 v = _mm256_add_ps(_mm256_mul_ps(_mm256_sub_ps(one, a), load_u8x8(in.data() + i)),
                                   _mm256_mul_ps(a, g));
    store_u8x8(out.data() + i, v);
  }
  for (; i < in.size(); ++i) {
    const float a = alpha[i];
    out[i] = static_cast<std::uint8_t>(clamp_round((1.0f - a) * static_cast<float>(in[i]) + a * gray));
  }
}

void add_saturate_avx2(std::span<const std::uint8_t> in, std::span<const float> delta,
                       std::span<std::uint8_t> out) {
  std::size_t i = 0;
  for (; i + 8 <= in.size(); i += 8) {
    store_u8x8(out.data() + i, _mm256_add_ps(load_u8x8(in.data() + i), _mm256_loadu_ps(delta.data() + i)));
  }
  for (; i < in.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(clamp_round(static_cast<float>(in[i]) + delta[i]));
  }
}

}  // namespace

const KernelTable& avx2_kernels() noexcept {
  static const KernelTable table{
      "avx2",          pass_moments_avx2,   sum_avx2,          sq_dev_sum_avx2,
      iou_sum_avx2,    residual_stats_avx2, blend_toward_avx2, add_saturate_avx2,
  };
  return table;
}

}  // namespace shiftbench::kernels

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

#include "shiftbench/weather.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "shiftbench/error.hpp"
#include "shiftbench/kernels.hpp"

namespace shiftbench {
namespace {

void check_input(const RgbImage& image, const AugmentationPreset& preset) {
  if (image.width != kAugmentSize || image.height != kAugmentSize) {
    throw ValidationError("weather augmentation expects a 256x256 image, got " + std::to_string(image.width) +
                          "x" + std::to_string(image.height));
  }
  if (image.pixels.size() != static_cast<std::size_t>(image.width) * image.height * 3) {
    throw ValidationError("image buffer size does not match its dimensions");
  }
  preset.validate();
}

// Distance from (px, py) to the segment a-b.
double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
  const double dx = bx - ax, dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = px - (ax + t * dx), ey = py - (ay + t * dy);
  return std::sqrt(ex * ex + ey * ey);
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// Smooth value noise in [0, 1] on a lattice with the given spacing.
std::vector<double> value_noise(int width, int height, double spacing, Rng& rng) {
  const int gw = static_cast<int>(std::ceil(width / spacing)) + 2;
  const int gh = static_cast<int>(std::ceil(height / spacing)) + 2;
  std::vector<double> lattice(static_cast<std::size_t>(gw) * gh);
  for (double& v : lattice) v = uniform01(rng);
  std::vector<double> out(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    const double fy = (y + 0.5) / spacing;
    const int iy = static_cast<int>(fy);
    const double ty = smoothstep(fy - iy);
    for (int x = 0; x < width; ++x) {
      const double fx = (x + 0.5) / spacing;
      const int ix = static_cast<int>(fx);
      const double tx = smoothstep(fx - ix);
      auto at = [&](int gx, int gy) { return lattice[static_cast<std::size_t>(gy) * gw + gx]; };
      const double top = (1 - tx) * at(ix, iy) + tx * at(ix + 1, iy);
      const double bot = (1 - tx) * at(ix, iy + 1) + tx * at(ix + 1, iy + 1);
      out[static_cast<std::size_t>(y) * width + x] = (1 - ty) * top + ty * bot;
    }
  }
  return out;
}

}  // namespace

void AugmentationPreset::validate() const {
  if (level != 1 && level != 2) throw ValidationError("augmentation level must be 1 or 2");
  if (effect == Effect::Rain) {
    if (rain.density < 0.0) throw ValidationError("rain density must be >= 0");
    if (rain.length < 0.0 || rain.thickness < 0.0) throw ValidationError("rain streak size must be >= 0");
  } else {
    if (!(fog.alpha >= 0.0 && fog.alpha <= 1.0)) throw ValidationError("fog alpha must lie in [0, 1]");
    if (!(fog.gray_level >= 0.0 && fog.gray_level <= 255.0)) throw ValidationError("fog gray level must lie in [0, 255]");
    if (!(fog.noise_scale > 0.0)) throw ValidationError("fog noise scale must be > 0");
    if (!(fog.noise_strength >= 0.0 && fog.noise_strength < 1.0))
      throw ValidationError("fog noise strength must lie in [0, 1)");
  }
}

AugmentationPreset rain_preset(int level) {
  AugmentationPreset p;
  p.effect = Effect::Rain;
  p.level = level;
  if (level == 1) {
    p.rain = {.density = 4.0, .length = 14.0, .thickness = 1.0, .angle_deg = 80.0, .brightness_delta = 55.0};
  } else if (level == 2) {
    p.rain = {.density = 12.0, .length = 24.0, .thickness = 1.5, .angle_deg = 80.0, .brightness_delta = 70.0};
  } else {
    throw ValidationError("augmentation level must be 1 or 2");
  }
  return p;
}

AugmentationPreset fog_preset(int level) {
  AugmentationPreset p;
  p.effect = Effect::Fog;
  p.level = level;
  if (level == 1) {
    p.fog = {.alpha = 0.30, .gray_level = 200.0, .noise_scale = 64.0, .noise_strength = 0.25};
  } else if (level == 2) {
    p.fog = {.alpha = 0.60, .gray_level = 200.0, .noise_scale = 64.0, .noise_strength = 0.25};
  } else {
    throw ValidationError("augmentation level must be 1 or 2");
  }
  return p;
}

AugmentationPreset weather_preset(Effect effect, int level) {
  return effect == Effect::Rain ? rain_preset(level) : fog_preset(level);
}

bool dominates(const AugmentationPreset& heavy, const AugmentationPreset& light) {
  if (heavy.effect != light.effect) return false;
  if (heavy.effect == Effect::Rain) {
    return heavy.rain.density > light.rain.density && heavy.rain.length >= light.rain.length &&
           heavy.rain.thickness >= light.rain.thickness && heavy.rain.brightness_delta >= light.rain.brightness_delta;
  }
  return heavy.fog.alpha > light.fog.alpha;
}

RgbImage apply_rain(const RgbImage& image, const AugmentationPreset& preset, Rng& rng) {
  check_input(image, preset);
  const RainParams& p = preset.rain;
  const int w = image.width, h = image.height;
  const auto streaks = static_cast<long>(std::lround(p.density * w * h / 1e4));
  const double half = 0.5 * p.thickness;
  std::vector<float> layer(static_cast<std::size_t>(w) * h, 0.0f);

  for (long s = 0; s < streaks; ++s) {
    const double cx = uniform(rng, 0.0, w);
    const double cy = uniform(rng, 0.0, h);
    const double angle = (p.angle_deg + uniform(rng, -5.0, 5.0)) * std::numbers::pi / 180.0;
    const double len = p.length * uniform(rng, 0.8, 1.2);
    const double dx = 0.5 * len * std::cos(angle), dy = 0.5 * len * std::sin(angle);
    const double ax = cx - dx, ay = cy - dy, bx = cx + dx, by = cy + dy;
    const double reach = half + 1.0;
    const int x_lo = std::max(0, static_cast<int>(std::floor(std::min(ax, bx) - reach)));
    const int x_hi = std::min(w - 1, static_cast<int>(std::ceil(std::max(ax, bx) + reach)));
    const int y_lo = std::max(0, static_cast<int>(std::floor(std::min(ay, by) - reach)));
    const int y_hi = std::min(h - 1, static_cast<int>(std::ceil(std::max(ay, by) + reach)));
    for (int y = y_lo; y <= y_hi; ++y) {
      for (int x = x_lo; x <= x_hi; ++x) {
        const double d = segment_distance(x + 0.5, y + 0.5, ax, ay, bx, by);
        const double coverage = std::clamp(half + 0.5 - d, 0.0, 1.0);
        if (coverage <= 0.0) continue;
        float& v = layer[static_cast<std::size_t>(y) * w + x];
        v = std::max(v, static_cast<float>(coverage * p.brightness_delta));
      }
    }
  }

  std::vector<float> delta(image.pixels.size());
  for (std::size_t i = 0; i < layer.size(); ++i) delta[3 * i] = delta[3 * i + 1] = delta[3 * i + 2] = layer[i];
  RgbImage out{w, h, std::vector<std::uint8_t>(image.pixels.size())};
  kernels::active_kernels().add_saturate(image.pixels, delta, out.pixels);
  return out;
}

RgbImage apply_fog(const RgbImage& image, const AugmentationPreset& preset, Rng& rng) {
  check_input(image, preset);
  const FogParams& p = preset.fog;
  const int w = image.width, h = image.height;
  const std::size_t n = static_cast<std::size_t>(w) * h;

  std::vector<double> a(n, p.alpha);
  if (p.noise_strength > 0.0 && p.alpha > 0.0) {
    const std::vector<double> noise = value_noise(w, h, p.noise_scale, rng);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = p.alpha * (1.0 + p.noise_strength * (2.0 * noise[i] - 1.0));
      total += a[i];
    }
    // Rescale so the field's mean is exactly the preset alpha.
    const double k = p.alpha * static_cast<double>(n) / total;
    for (double& v : a) v = std::clamp(v * k, 0.0, 1.0);
  }

  std::vector<float> alpha(image.pixels.size());
  for (std::size_t i = 0; i < n; ++i) {
    alpha[3 * i] = alpha[3 * i + 1] = alpha[3 * i + 2] = static_cast<float>(a[i]);
  }
  RgbImage out{w, h, std::vector<std::uint8_t>(image.pixels.size())};
  kernels::active_kernels().blend_toward(image.pixels, alpha, static_cast<float>(p.gray_level), out.pixels);
  return out;
}

RgbImage apply_weather(const RgbImage& image, const AugmentationPreset& preset, Rng& rng) {
  return preset.effect == Effect::Rain ? apply_rain(image, preset, rng) : apply_fog(image, preset, rng);
}

Rng image_rng(std::uint64_t seed, std::string_view image_id) { return derive_rng(seed, image_id, 0x77ea7e5ULL); }

Effect parse_effect(std::string_view name) {
  if (name == "rain") return Effect::Rain;
  if (name == "fog") return Effect::Fog;
  throw ValidationError("unknown effect '" + std::string(name) + "' (expected rain or fog)");
}

const char* to_string(Effect e) noexcept { return e == Effect::Rain ? "rain" : "fog"; }

}  // namespace shiftbench

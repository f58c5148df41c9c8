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

#include <cstdint>
#include <string_view>

#include "shiftbench/image.hpp"
#include "shiftbench/random.hpp"

namespace shiftbench {

// Procedural rain and fog at two severities for 256 x 256 crops. Geometry is
// never touched, so box annotations stay valid.

enum class Effect { Rain, Fog };

struct RainParams {
  double density = 0.0;           // streaks per 10^4 px^2
  double length = 0.0;            // px
  double thickness = 0.0;         // px
  double angle_deg = 0.0;         // from the horizontal axis
  double brightness_delta = 0.0;  // added at full streak coverage
};

struct FogParams {
  double alpha = 0.0;           // mean blend weight towards gray, [0, 1]
  double gray_level = 0.0;      // [0, 255]
  double noise_scale = 64.0;    // px between noise lattice points
  double noise_strength = 0.0;  // relative modulation of alpha, 0 disables noise
};

struct AugmentationPreset {
  Effect effect = Effect::Rain;
  int level = 1;
  RainParams rain;
  FogParams fog;

  void validate() const;
};

inline constexpr int kAugmentSize = 256;

AugmentationPreset rain_preset(int level);
AugmentationPreset fog_preset(int level);
AugmentationPreset weather_preset(Effect effect, int level);

// True when `heavy` is strictly more severe than `light` for their effect.
bool dominates(const AugmentationPreset& heavy, const AugmentationPreset& light);

// Throw ValidationError unless the image is 256 x 256 and the level is 1 or 2.
RgbImage apply_rain(const RgbImage& image, const AugmentationPreset& preset, Rng& rng);
RgbImage apply_fog(const RgbImage& image, const AugmentationPreset& preset, Rng& rng);
RgbImage apply_weather(const RgbImage& image, const AugmentationPreset& preset, Rng& rng);

// Per-image stream derived from (seed, image_id).
Rng image_rng(std::uint64_t seed, std::string_view image_id);

Effect parse_effect(std::string_view name);
const char* to_string(Effect e) noexcept;

}  // namespace shiftbench

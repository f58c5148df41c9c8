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
#include <random>
#include <string_view>

namespace shiftbench {

using Rng = std::mt19937_64;

// Independent stream for one keyed unit of work (a scene, an image, an
// object). Streams depend only on their key, never on scheduling.
Rng derive_rng(std::uint64_t seed, std::string_view key, std::uint64_t index = 0);

// Uniform double in [0, 1) from the top 53 bits of one draw. Used instead of
// std::uniform_real_distribution so outputs match across standard libraries.
double uniform01(Rng& rng);
double uniform(Rng& rng, double lo, double hi);

// Uniform integer in [0, n) by rejection; n > 0.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

}  // namespace shiftbench

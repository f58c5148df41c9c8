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
#include <filesystem>
#include <vector>

#include "shiftbench/box.hpp"

namespace shiftbench {

// 8-bit sRGB image, interleaved RGB, row-major.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  static RgbImage filled(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b);

  std::size_t index(int x, int y) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
  }
  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

// Bilinear resample of `window` (pixel coordinates, continuous) to a
// size x size image. Samples outside the source clamp to the border.
RgbImage resample_window(const RgbImage& src, const Box& window, int size);

// Throw IoError on failure. Any PNG color type is converted to RGB on read.
RgbImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const RgbImage& image);

}  // namespace shiftbench

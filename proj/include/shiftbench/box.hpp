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
#include <optional>
#include <span>

namespace shiftbench {

// Axis-aligned box in pixel coordinates, corner-point convention.
// Coordinates are continuous reals; zero-area boxes are rejected.
class Box {
 public:
  // Throws ValidationError unless x1 < x2 and y1 < y2 (all finite).
  Box(double x1, double y1, double x2, double y2);
  explicit Box(const std::array<double, 4>& corners)
      : Box(corners[0], corners[1], corners[2], corners[3]) {}

  double x1() const noexcept { return c_[0]; }
  double y1() const noexcept { return c_[1]; }
  double x2() const noexcept { return c_[2]; }
  double y2() const noexcept { return c_[3]; }
  double width() const noexcept { return c_[2] - c_[0]; }
  double height() const noexcept { return c_[3] - c_[1]; }
  double area() const noexcept { return width() * height(); }
  double center_x() const noexcept { return 0.5 * (c_[0] + c_[2]); }
  double center_y() const noexcept { return 0.5 * (c_[1] + c_[3]); }

  const std::array<double, 4>& corners() const noexcept { return c_; }

  friend bool operator==(const Box&, const Box&) = default;

 private:
  std::array<double, 4> c_;
};

// Reference box for the anchor-offset parametrization.
struct AnchorSpec {
  double center_x;
  double center_y;
  double width;
  double height;

  // Throws ValidationError unless width > 0 and height > 0.
  void validate() const;
  // Anchor with the same center and size as `box`.
  static AnchorSpec from_box(const Box& box);
};

// Average of a set of boxes, usable as a data-derived anchor.
// Throws ValidationError on an empty set.
AnchorSpec mean_anchor(std::span<const Box> boxes);

enum class BoxKind { CornerPoints, CenterPoint, AnchorOffsets };

// Four regression targets whose meaning depends on `kind`:
//   CornerPoints   (x1, y1, x2, y2)
//   CenterPoint    (cx, cy, w, h)
//   AnchorOffsets  (tx, ty, th, tw)   -- note th precedes tw
struct BoxEncoding {
  BoxKind kind;
  std::array<double, 4> values;
};

double iou(const Box& a, const Box& b) noexcept;

// Mean absolute coordinate difference of one box pair, in pixels.
double box_mae(const Box& pred, const Box& truth) noexcept;

// Area of `box` inside `window`; zero when disjoint.
double clip_area_in_window(const Box& box, const Box& window) noexcept;

// `anchor` is required for AnchorOffsets and ignored otherwise.
BoxEncoding encode_box(const Box& box, BoxKind kind,
                       const std::optional<AnchorSpec>& anchor = std::nullopt);

// Anchor decode:  w = exp(tw) wa,  h = exp(th) ha,  cx = tx wa + cxa,  cy = ty ha + cya.
// Throws ValidationError when the decoded box has no area or the anchor is missing.
Box decode_box(const BoxEncoding& enc, const std::optional<AnchorSpec>& anchor = std::nullopt);

const char* to_string(BoxKind kind) noexcept;

}  // namespace shiftbench

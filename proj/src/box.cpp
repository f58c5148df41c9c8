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

#include "shiftbench/box.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shiftbench/error.hpp"

namespace shiftbench {
namespace {

double overlap_1d(double a_lo, double a_hi, double b_lo, double b_hi) noexcept {
  const double d = std::min(a_hi, b_hi) - std::max(a_lo, b_lo);
  return d > 0.0 ? d : 0.0;
}

}  // namespace

Box::Box(double x1, double y1, double x2, double y2) : c_{x1, y1, x2, y2} {
  for (double v : c_) {
    if (!std::isfinite(v)) throw ValidationError("box coordinate is not finite");
  }
  if (!(x1 < x2)) throw ValidationError("x1 < x2 violated");
  if (!(y1 < y2)) throw ValidationError("y1 < y2 violated");
}

void AnchorSpec::validate() const {
  if (!(width > 0.0) || !std::isfinite(width)) throw ValidationError("anchor width must be > 0");
  if (!(height > 0.0) || !std::isfinite(height)) throw ValidationError("anchor height must be > 0");
  if (!std::isfinite(center_x) || !std::isfinite(center_y))
    throw ValidationError("anchor center is not finite");
}

AnchorSpec AnchorSpec::from_box(const Box& box) {
  return {box.center_x(), box.center_y(), box.width(), box.height()};
}

AnchorSpec mean_anchor(std::span<const Box> boxes) {
  if (boxes.empty()) throw ValidationError("cannot derive an anchor from zero boxes");
  double cx = 0, cy = 0, w = 0, h = 0;
  for (const Box& b : boxes) {
    cx += b.center_x();
    cy += b.center_y();
    w += b.width();
    h += b.height();
  }
  const double n = static_cast<double>(boxes.size());
  return {cx / n, cy / n, w / n, h / n};
}

double iou(const Box& a, const Box& b) noexcept {
  const double inter = overlap_1d(a.x1(), a.x2(), b.x1(), b.x2()) *
                       overlap_1d(a.y1(), a.y2(), b.y1(), b.y2());
  const double uni = a.area() + b.area() - inter;
  return inter / uni;
}

double box_mae(const Box& pred, const Box& truth) noexcept {
  double s = 0.0;
  for (int j = 0; j < 4; ++j) s += std::abs(pred.corners()[j] - truth.corners()[j]);
  return s / 4.0;
}

double clip_area_in_window(const Box& box, const Box& window) noexcept {
  return overlap_1d(box.x1(), box.x2(), window.x1(), window.x2()) *
         overlap_1d(box.y1(), box.y2(), window.y1(), window.y2());
}

BoxEncoding encode_box(const Box& box, BoxKind kind, const std::optional<AnchorSpec>& anchor) {
  switch (kind) {
    case BoxKind::CornerPoints:
      return {kind, box.corners()};
    case BoxKind::CenterPoint:
      return {kind, {box.center_x(), box.center_y(), box.width(), box.height()}};
    case BoxKind::AnchorOffsets: {
      if (!anchor) throw ValidationError("anchor-offset encoding requires an anchor");
      anchor->validate();
      const double tx = (box.center_x() - anchor->center_x) / anchor->width;
      const double ty = (box.center_y() - anchor->center_y) / anchor->height;
      const double th = std::log(box.height() / anchor->height);
      const double tw = std::log(box.width() / anchor->width);
      return {kind, {tx, ty, th, tw}};
    }
  }
  throw ValidationError("unknown box encoding kind");
}

Box decode_box(const BoxEncoding& enc, const std::optional<AnchorSpec>& anchor) {
  const auto& v = enc.values;
  double cx = 0, cy = 0, w = 0, h = 0;
  switch (enc.kind) {
    case BoxKind::CornerPoints:
      return Box(v[0], v[1], v[2], v[3]);
    case BoxKind::CenterPoint:
      cx = v[0];
      cy = v[1];
      w = v[2];
      h = v[3];
      break;
    case BoxKind::AnchorOffsets:
      if (!anchor) throw ValidationError("anchor-offset decoding requires an anchor");
      anchor->validate();
      w = std::exp(v[3]) * anchor->width;
      h = std::exp(v[2]) * anchor->height;
      cx = v[0] * anchor->width + anchor->center_x;
      cy = v[1] * anchor->height + anchor->center_y;
      break;
  }
  if (!(w > 0.0) || !(h > 0.0))
    throw ValidationError("decoded box has non-positive size (w=" + std::to_string(w) +
                          ", h=" + std::to_string(h) + ")");
  return Box(cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h);
}

const char* to_string(BoxKind kind) noexcept {
  switch (kind) {
    case BoxKind::CornerPoints:
      return "corner_points";
    case BoxKind::CenterPoint:
      return "center_point";
    case BoxKind::AnchorOffsets:
      return "anchor_offsets";
  }
  return "unknown";
}

}  // namespace shiftbench

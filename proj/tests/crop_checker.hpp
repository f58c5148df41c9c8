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

// Re-derives every CropSpec property from first principles, without calling
// into the curation code.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "shiftbench/curation.hpp"

namespace shiftbench::testing {

inline constexpr double kGeomTol = 1e-9;

inline double overlap_area(const Box& a, const Box& w) {
  const double ix = std::min(a.x2(), w.x2()) - std::max(a.x1(), w.x1());
  const double iy = std::min(a.y2(), w.y2()) - std::max(a.y1(), w.y1());
  return (ix > 0 && iy > 0) ? ix * iy : 0.0;
}

// Empty string when the spec is valid, otherwise the first violated property.
inline std::string check_crop(const CropSpec& s, const SceneAnnotation& scene, const CurationConfig& cfg) {
  if (s.image_id != scene.image_id) return "image id";
  if (s.main_object_index >= scene.objects.size()) return "object index";
  const SceneObject& obj = scene.objects[s.main_object_index];
  const Box& w = s.window;
  const double side = w.x2() - w.x1();
  if (std::abs(side - (w.y2() - w.y1())) > kGeomTol) return "square";
  if (w.x1() < -kGeomTol || w.y1() < -kGeomTol || w.x2() > scene.width + kGeomTol || w.y2() > scene.height + kGeomTol)
    return "in bounds";
  if (obj.box.x1() < w.x1() - kGeomTol || obj.box.y1() < w.y1() - kGeomTol || obj.box.x2() > w.x2() + kGeomTol ||
      obj.box.y2() > w.y2() + kGeomTol)
    return "containment";
  if (obj.box.x2() - obj.box.x1() < cfg.min_object_width) return "minimum width";
  if (cfg.drop_occluded_truncated && !cfg.occlusion_exempt_classes.contains(obj.class_id) &&
      (obj.occluded || obj.truncated))
    return "occlusion policy";
  const double main_area = overlap_area(obj.box, w);
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    if (i == s.main_object_index) continue;
    // a/b <= r checked as a <= r*b with slack for the rounding of either form.
    if (overlap_area(scene.objects[i].box, w) > cfg.overlap_ratio_max * main_area * (1 + 1e-12)) return "overlap";
  }
  if (std::abs(s.scale - cfg.target_size / side) > kGeomTol) return "scale";
  const double t = cfg.target_size;
  const double expect[4] = {(obj.box.x1() - w.x1()) * t / side, (obj.box.y1() - w.y1()) * t / side,
                            (obj.box.x2() - w.x1()) * t / side, (obj.box.y2() - w.y1()) * t / side};
  for (int k = 0; k < 4; ++k) {
    const double v = s.out_box.corners()[static_cast<std::size_t>(k)];
    if (v < 0.0 || v > t) return "out_box range";
    if (std::abs(v - expect[k]) > kGeomTol) return "out_box transform";
  }
  if (s.class_id != obj.class_id) return "class id";
  return {};
}

inline SceneAnnotation random_scene(std::mt19937_64& g, std::size_t index) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SceneAnnotation s;
  s.image_id = "scene-" + std::to_string(index);
  s.width = std::floor(200 + u(g) * 1400);
  s.height = std::floor(150 + u(g) * 850);
  const int n = 1 + static_cast<int>(u(g) * 8);
  for (int i = 0; i < n; ++i) {
    const double max_side = std::min(s.width, s.height) * 1.1;
    double w = 5 + u(g) * u(g) * max_side, h = 5 + u(g) * u(g) * max_side;
    w = std::min(w, s.width);
    h = std::min(h, s.height);
    // Some objects hug the image corners.
    double x = u(g) < 0.2 ? (u(g) < 0.5 ? 0.0 : s.width - w) : u(g) * (s.width - w);
    double y = u(g) < 0.2 ? (u(g) < 0.5 ? 0.0 : s.height - h) : u(g) * (s.height - h);
    SceneObject o;
    o.class_id = static_cast<int>(u(g) * 7);
    o.box = Box(x, y, x + w, y + h);
    o.occluded = u(g) < 0.15;
    o.truncated = u(g) < 0.1;
    s.objects.push_back(o);
  }
  return s;
}

}  // namespace shiftbench::testing

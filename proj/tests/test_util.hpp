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

// Builders and generators shared by the unit tests.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "shiftbench/aggregation.hpp"
#include "shiftbench/box.hpp"
#include "shiftbench/records.hpp"

namespace shiftbench::testing {

inline GroundTruthRecord truth(std::string id, int class_id, int num_classes = 7,
                               std::array<double, 4> box = {10, 10, 50, 50}, std::string dataset = "ID") {
  GroundTruthRecord r;
  r.image_id = std::move(id);
  r.dataset = std::move(dataset);
  r.class_id = class_id;
  r.num_classes = num_classes;
  r.box = Box(box);
  return r;
}

inline AggregatedPrediction probs_only(std::string id, std::vector<double> p, std::string method = "mc") {
  AggregatedPrediction a;
  a.image_id = std::move(id);
  a.method = std::move(method);
  a.pass_count = 1;
  const std::size_t top = argmax_lowest(p);
  a.predicted_class = static_cast<int>(top);
  a.confidence = p[top];
  a.mean_probs = std::move(p);
  return a;
}

inline AggregatedPrediction box_only(std::string id, std::array<double, 4> box, std::array<double, 4> var,
                                     std::string method = "mc") {
  AggregatedPrediction a;
  a.image_id = std::move(id);
  a.method = std::move(method);
  a.pass_count = 2;
  a.mean_box = box;
  a.box_variance = var;
  return a;
}

// Prediction with probability `conf` on `top` and the rest spread evenly.
inline std::vector<double> peaked(int classes, int top, double conf) {
  std::vector<double> p(static_cast<std::size_t>(classes), (1.0 - conf) / (classes - 1));
  p[static_cast<std::size_t>(top)] = conf;
  return p;
}

inline Box random_box(std::mt19937_64& g, double extent = 256.0, double min_side = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double w = min_side + u(g) * (extent / 2 - min_side);
  const double h = min_side + u(g) * (extent / 2 - min_side);
  const double x = u(g) * (extent - w);
  const double y = u(g) * (extent - h);
  return Box(x, y, x + w, y + h);
}

inline std::string id_of(std::size_t i) { return "img-" + std::to_string(i); }

}  // namespace shiftbench::testing

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
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shiftbench/box.hpp"
#include "shiftbench/random.hpp"

namespace shiftbench {

// Class ids of the in-distribution label space.
enum ClassId : int {
  kTrafficSign = 0,
  kTrafficLight = 1,
  kCar = 2,
  kTruck = 3,
  kPedestrian = 4,
  kBus = 5,
  kBike = 6,
};

struct SceneObject {
  int class_id = 0;
  Box box{0.0, 0.0, 1.0, 1.0};  // original-image pixels
  bool occluded = false;
  bool truncated = false;
};

struct SceneAnnotation {
  std::string image_id;
  double width = 0.0;
  double height = 0.0;
  std::vector<SceneObject> objects;
};

enum class Split { Train, Validation, Test };

struct CurationConfig {
  double target_size = 256.0;
  double min_object_width = 30.0;
  double overlap_ratio_max = 1.0 / 3.0;
  // Upper bound of the random window side as a multiple of the smallest
  // square that still contains the object.
  double max_expansion = 3.0;
  bool drop_occluded_truncated = true;
  std::set<int> occlusion_exempt_classes{kPedestrian, kBike};
  // Source class -> target class; a negative target drops the object.
  std::map<int, int> class_remap;
  Split split = Split::Train;
  // Per-class cap overrides; otherwise 5000 / 1000 / 1000 by split.
  std::map<int, std::size_t> class_caps;
  std::uint64_t rng_seed = 0;

  // Throws ValidationError on out-of-range values.
  void validate() const;
  std::size_t cap_for(int class_id) const;
};

struct CropSpec {
  std::string image_id;
  std::size_t main_object_index = 0;
  Box window{0.0, 0.0, 1.0, 1.0};  // square, original pixels
  double scale = 1.0;              // target_size / side
  Box out_box{0.0, 0.0, 1.0, 1.0};  // main object in the target frame
  int class_id = 0;

  friend bool operator==(const CropSpec&, const CropSpec&) = default;
};

enum class SkipReason { TooSmall, OccludedOrTruncated, RemovedClass, NoFeasibleWindow, OverlapRule };

struct ObjectOutcome {
  std::size_t object_index = 0;
  std::optional<SkipReason> skipped;  // nullopt: a CropSpec was emitted
};

struct SceneCuration {
  std::vector<CropSpec> specs;
  std::vector<ObjectOutcome> outcomes;  // one per object, in index order
};

const char* to_string(SkipReason r) noexcept;

// Throws ValidationError unless every object lies inside the image.
void validate(const SceneAnnotation& scene);

// Objects narrower than the minimum are removed; the boundary width is kept.
bool min_size_filter(const SceneObject& object, const CurationConfig& cfg) noexcept;
bool passes_occlusion_policy(const SceneObject& object, const CurationConfig& cfg) noexcept;

// Side of the smallest square centered at (cx, cy) containing `object`.
double min_window_side(const Box& object, double cx, double cy) noexcept;

// Square window of the given side, centered on (cx, cy) as far as possible,
// then moved the minimum distance needed to contain `object` and stay inside
// [0, width] x [0, height]. Requires max(object w, h) <= side <= min(width, height).
Box place_window(const Box& object, double cx, double cy, double side, double width, double height);

// Random jittered window for one object: the object center is shifted by
// r (cos t, sin t), t ~ U[0, 2 pi), r ~ U[0, s0 / 2] with s0 the object's
// tight square side; the side is drawn from U[s_min, min(k s_min, image side)].
// nullopt when the object cannot fit in any square inside the image.
std::optional<CropSpec> propose_crop(const SceneAnnotation& scene, std::size_t object_index,
                                     const CurationConfig& cfg, Rng& rng);

// Every other object may cover at most overlap_ratio_max of the main
// object's area inside the window (clipped areas, inclusive).
bool single_main_object_check(const CropSpec& spec, const SceneAnnotation& scene, const CurationConfig& cfg);

// (main box - window origin) * scale, clamped to the target frame.
Box transform_annotation(const Box& main_box, const Box& window, double target_size = 256.0);
Box transform_annotation(const CropSpec& spec, const SceneAnnotation& scene, double target_size = 256.0);

// Random stream of one object, derived from (seed, image_id, index).
Rng object_rng(std::uint64_t seed, std::string_view image_id, std::size_t object_index);

// Applies the class remap, pre-filters, proposal and overlap rule to every
// object. Each object draws from its own stream, so filter order does not
// change the proposals.
SceneCuration curate_scene(const SceneAnnotation& scene, const CurationConfig& cfg);

// Curates scenes on up to `threads` workers; output order follows `scenes`.
std::vector<SceneCuration> curate_scenes(std::span<const SceneAnnotation> scenes, const CurationConfig& cfg,
                                         std::size_t threads = 1);

// Per class, a uniform subsample without replacement down to the class cap.
// Survivors keep their input order.
std::vector<CropSpec> apply_class_caps(std::span<const CropSpec> specs, const CurationConfig& cfg);

// JSON Lines for scenes (input) and crop specs (output).
std::vector<SceneAnnotation> parse_scenes(std::string_view text, std::size_t threads = 1);
std::string to_json_line(const SceneAnnotation& scene);
std::string to_json_line(const CropSpec& spec);
std::vector<CropSpec> parse_crop_specs(std::string_view text);

}  // namespace shiftbench

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

#include "shiftbench/curation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "jsonl.hpp"
#include "shiftbench/error.hpp"
#include "shiftbench/parallel.hpp"

namespace shiftbench {
namespace {

using jsonl::Json;

std::size_t default_cap(Split split) {
  switch (split) {
    case Split::Train:
      return 5000;
    case Split::Validation:
    case Split::Test:
      return 1000;
  }
  return 0;
}

}  // namespace

void CurationConfig::validate() const {
  if (!(target_size > 0.0)) throw ValidationError("target_size must be > 0");
  if (!(min_object_width >= 0.0)) throw ValidationError("min_object_width must be >= 0");
  if (!(overlap_ratio_max > 0.0 && overlap_ratio_max < 1.0))
    throw ValidationError("overlap_ratio_max must lie in (0, 1)");
  if (!(max_expansion >= 1.0)) throw ValidationError("max_expansion must be >= 1");
}

std::size_t CurationConfig::cap_for(int class_id) const {
  auto it = class_caps.find(class_id);
  return it != class_caps.end() ? it->second : default_cap(split);
}

const char* to_string(SkipReason r) noexcept {
  switch (r) {
    case SkipReason::TooSmall:
      return "too_small";
    case SkipReason::OccludedOrTruncated:
      return "occluded_or_truncated";
    case SkipReason::RemovedClass:
      return "removed_class";
    case SkipReason::NoFeasibleWindow:
      return "no_feasible_window";
    case SkipReason::OverlapRule:
      return "overlap_rule";
  }
  return "unknown";
}

void validate(const SceneAnnotation& scene) {
  if (scene.image_id.empty()) throw ValidationError("scene image_id must not be empty");
  if (!(scene.width > 0.0) || !(scene.height > 0.0))
    throw ValidationError("scene '" + scene.image_id + "': width and height must be > 0");
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const Box& b = scene.objects[i].box;
    if (b.x1() < 0.0 || b.y1() < 0.0 || b.x2() > scene.width || b.y2() > scene.height) {
      throw ValidationError("scene '" + scene.image_id + "': object " + std::to_string(i) +
                            " lies outside the image");
    }
  }
}

bool min_size_filter(const SceneObject& object, const CurationConfig& cfg) noexcept {
  return object.box.width() >= cfg.min_object_width;
}

bool passes_occlusion_policy(const SceneObject& object, const CurationConfig& cfg) noexcept {
  if (!cfg.drop_occluded_truncated) return true;
  if (cfg.occlusion_exempt_classes.contains(object.class_id)) return true;
  return !object.occluded && !object.truncated;
}

double min_window_side(const Box& object, double cx, double cy) noexcept {
  const double half_w = std::max(std::abs(cx - object.x1()), std::abs(object.x2() - cx));
  const double half_h = std::max(std::abs(cy - object.y1()), std::abs(object.y2() - cy));
  return 2.0 * std::max(half_w, half_h);
}

Box place_window(const Box& object, double cx, double cy, double side, double width, double height) {
  auto origin = [side](double center, double lo, double hi, double extent) {
    const double min_o = std::max(hi - side, 0.0);
    const double max_o = std::min(lo, extent - side);
    return std::clamp(center - 0.5 * side, min_o, std::max(min_o, max_o));
  };
  const double ox = origin(cx, object.x1(), object.x2(), width);
  const double oy = origin(cy, object.y1(), object.y2(), height);
  return Box(ox, oy, ox + side, oy + side);
}

Box transform_annotation(const Box& main_box, const Box& window, double target_size) {
  const double scale = target_size / window.width();
  auto map = [&](double v, double origin) { return std::clamp((v - origin) * scale, 0.0, target_size); };
  return Box(map(main_box.x1(), window.x1()), map(main_box.y1(), window.y1()), map(main_box.x2(), window.x1()),
             map(main_box.y2(), window.y1()));
}

Box transform_annotation(const CropSpec& spec, const SceneAnnotation& scene, double target_size) {
  return transform_annotation(scene.objects.at(spec.main_object_index).box, spec.window, target_size);
}

std::optional<CropSpec> propose_crop(const SceneAnnotation& scene, std::size_t object_index,
                                     const CurationConfig& cfg, Rng& rng) {
  const SceneObject& obj = scene.objects.at(object_index);
  const Box& b = obj.box;
  const double image_side = std::min(scene.width, scene.height);
  const double tight = std::max(b.width(), b.height());
  if (tight > image_side) return std::nullopt;

  const double theta = 2.0 * std::numbers::pi * uniform01(rng);
  const double radius = uniform(rng, 0.0, 0.5 * tight);
  const double cx = b.center_x() + radius * std::cos(theta);
  const double cy = b.center_y() + radius * std::sin(theta);

  const double s_min = min_window_side(b, cx, cy);
  const double lo = std::min(s_min, image_side);
  const double hi = std::min(cfg.max_expansion * s_min, image_side);
  const double side = uniform(rng, lo, std::max(lo, hi));

  CropSpec spec;
  spec.image_id = scene.image_id;
  spec.main_object_index = object_index;
  spec.class_id = obj.class_id;
  spec.window = place_window(b, cx, cy, side, scene.width, scene.height);
  spec.scale = cfg.target_size / spec.window.width();
  spec.out_box = transform_annotation(b, spec.window, cfg.target_size);
  return spec;
}

bool single_main_object_check(const CropSpec& spec, const SceneAnnotation& scene, const CurationConfig& cfg) {
  const double main_area = clip_area_in_window(scene.objects.at(spec.main_object_index).box, spec.window);
  if (!(main_area > 0.0)) return false;
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    if (i == spec.main_object_index) continue;
    const double other = clip_area_in_window(scene.objects[i].box, spec.window);
    if (other / main_area > cfg.overlap_ratio_max) return false;
  }
  return true;
}

Rng object_rng(std::uint64_t seed, std::string_view image_id, std::size_t object_index) {
  return derive_rng(seed, image_id, object_index);
}

SceneCuration curate_scene(const SceneAnnotation& scene, const CurationConfig& cfg) {
  validate(scene);
  SceneAnnotation mapped = scene;
  std::vector<bool> removed(scene.objects.size(), false);
  for (std::size_t i = 0; i < mapped.objects.size(); ++i) {
    auto it = cfg.class_remap.find(mapped.objects[i].class_id);
    if (it == cfg.class_remap.end()) continue;
    if (it->second < 0) {
      removed[i] = true;
    } else {
      mapped.objects[i].class_id = it->second;
    }
  }

  SceneCuration out;
  out.outcomes.reserve(mapped.objects.size());
  for (std::size_t i = 0; i < mapped.objects.size(); ++i) {
    const SceneObject& obj = mapped.objects[i];
    ObjectOutcome outcome{i, std::nullopt};
    if (removed[i]) {
      outcome.skipped = SkipReason::RemovedClass;
    } else if (!min_size_filter(obj, cfg)) {
      outcome.skipped = SkipReason::TooSmall;
    } else if (!passes_occlusion_policy(obj, cfg)) {
      outcome.skipped = SkipReason::OccludedOrTruncated;
    } else {
      Rng rng = object_rng(cfg.rng_seed, mapped.image_id, i);
      std::optional<CropSpec> spec = propose_crop(mapped, i, cfg, rng);
      if (!spec) {
        outcome.skipped = SkipReason::NoFeasibleWindow;
      } else if (!single_main_object_check(*spec, mapped, cfg)) {
        outcome.skipped = SkipReason::OverlapRule;
      } else {
        out.specs.push_back(std::move(*spec));
      }
    }
    out.outcomes.push_back(outcome);
  }
  return out;
}

std::vector<SceneCuration> curate_scenes(std::span<const SceneAnnotation> scenes, const CurationConfig& cfg,
                                         std::size_t threads) {
  cfg.validate();
  std::vector<SceneCuration> out(scenes.size());
  parallel_for(scenes.size(), threads, [&](std::size_t i) { out[i] = curate_scene(scenes[i], cfg); });
  return out;
}

std::vector<CropSpec> apply_class_caps(std::span<const CropSpec> specs, const CurationConfig& cfg) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < specs.size(); ++i) by_class[specs[i].class_id].push_back(i);

  std::vector<bool> keep(specs.size(), false);
  for (auto& [class_id, idx] : by_class) {
    const std::size_t cap = cfg.cap_for(class_id);
    if (idx.size() > cap) {
      Rng rng = derive_rng(cfg.rng_seed, "class-caps", static_cast<std::uint64_t>(static_cast<std::uint32_t>(class_id)));
      // Partial Fisher-Yates: the first `cap` slots become a uniform sample.
      for (std::size_t k = 0; k < cap; ++k) {
        const std::size_t j = k + uniform_index(rng, idx.size() - k);
        std::swap(idx[k], idx[j]);
      }
      idx.resize(cap);
    }
    for (std::size_t i : idx) keep[i] = true;
  }
  std::vector<CropSpec> out;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (keep[i]) out.push_back(specs[i]);
  }
  return out;
}

namespace {

SceneAnnotation decode_scene(const Json& j) {
  SceneAnnotation s;
  s.image_id = jsonl::get_string(j, "image_id");
  s.width = jsonl::get_number(jsonl::require(j, "width"), "width");
  s.height = jsonl::get_number(jsonl::require(j, "height"), "height");
  const Json& objects = jsonl::require(j, "objects");
  if (!objects.is_array()) throw ValidationError("field 'objects' must be an array");
  for (const Json& o : objects) {
    if (!o.is_object()) throw ValidationError("objects entries must be objects");
    SceneObject obj;
    obj.class_id = jsonl::get_int_field(o, "class_id");
    obj.box = Box(jsonl::get_box(jsonl::require(o, "box"), "box"));
    obj.occluded = jsonl::get_bool_or(o, "occluded", false);
    obj.truncated = jsonl::get_bool_or(o, "truncated", false);
    s.objects.push_back(obj);
  }
  validate(s);
  return s;
}

CropSpec decode_crop_spec(const Json& j) {
  CropSpec c;
  c.image_id = jsonl::get_string(j, "image_id");
  const int idx = jsonl::get_int_field(j, "object_index");
  if (idx < 0) throw ValidationError("object_index must be >= 0");
  c.main_object_index = static_cast<std::size_t>(idx);
  c.class_id = jsonl::get_int_field(j, "class_id");
  c.window = Box(jsonl::get_box(jsonl::require(j, "window"), "window"));
  c.scale = jsonl::get_number(jsonl::require(j, "scale"), "scale");
  c.out_box = Box(jsonl::get_box(jsonl::require(j, "box"), "box"));
  return c;
}

}  // namespace

std::vector<SceneAnnotation> parse_scenes(std::string_view text, std::size_t threads) {
  return jsonl::parse_lines<SceneAnnotation>(text, threads, decode_scene);
}

std::vector<CropSpec> parse_crop_specs(std::string_view text) {
  return jsonl::parse_lines<CropSpec>(text, 1, decode_crop_spec);
}

std::string to_json_line(const SceneAnnotation& scene) {
  Json j = Json::object();
  j["image_id"] = scene.image_id;
  j["width"] = scene.width;
  j["height"] = scene.height;
  Json objects = Json::array();
  for (const SceneObject& o : scene.objects) {
    objects.push_back({{"class_id", o.class_id},
                       {"box", o.box.corners()},
                       {"occluded", o.occluded},
                       {"truncated", o.truncated}});
  }
  j["objects"] = std::move(objects);
  return j.dump();
}

std::string to_json_line(const CropSpec& spec) {
  Json j = Json::object();
  j["image_id"] = spec.image_id;
  j["object_index"] = spec.main_object_index;
  j["class_id"] = spec.class_id;
  j["window"] = spec.window.corners();
  j["scale"] = spec.scale;
  j["box"] = spec.out_box.corners();
  return j.dump();
}

}  // namespace shiftbench

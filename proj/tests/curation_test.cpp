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

#include <map>
#include <random>

#include <gtest/gtest.h>

#include "crop_checker.hpp"
#include "shiftbench/error.hpp"

namespace shiftbench {
namespace {

using testing::check_crop;
using testing::random_scene;

SceneObject object(int cls, Box b, bool occluded = false, bool truncated = false) {
  return {cls, b, occluded, truncated};
}

TEST(MinSize, Boundary) {
  const CurationConfig cfg;
  EXPECT_FALSE(min_size_filter(object(kCar, Box(0, 0, 25, 50)), cfg));
  EXPECT_TRUE(min_size_filter(object(kCar, Box(0, 0, 30, 50)), cfg));
  EXPECT_TRUE(min_size_filter(object(kCar, Box(0, 0, 100, 50)), cfg));
}

TEST(OcclusionPolicy, ExemptClasses) {
  CurationConfig cfg;
  EXPECT_FALSE(passes_occlusion_policy(object(kCar, Box(0, 0, 40, 40), true), cfg));
  EXPECT_FALSE(passes_occlusion_policy(object(kTruck, Box(0, 0, 40, 40), false, true), cfg));
  EXPECT_TRUE(passes_occlusion_policy(object(kPedestrian, Box(0, 0, 40, 40), true, true), cfg));
  EXPECT_TRUE(passes_occlusion_policy(object(kBike, Box(0, 0, 40, 40), true), cfg));
  cfg.drop_occluded_truncated = false;
  EXPECT_TRUE(passes_occlusion_policy(object(kCar, Box(0, 0, 40, 40), true), cfg));
}

TEST(PlaceWindow, TightSquareWithoutJitter) {
  const Box b(100, 100, 160, 140);
  const double side = min_window_side(b, b.center_x(), b.center_y());
  EXPECT_EQ(side, 60.0);
  EXPECT_EQ(place_window(b, b.center_x(), b.center_y(), side, 1000, 800), Box(100, 90, 160, 150));
}

TEST(PlaceWindow, ShiftsInsideImage) {
  const Box b(0, 0, 40, 40);
  const Box w = place_window(b, 10, 10, 100, 300, 300);
  EXPECT_EQ(w, Box(0, 0, 100, 100));
  const Box c(260, 270, 300, 300);
  const Box v = place_window(c, 290, 290, 80, 300, 300);
  EXPECT_EQ(v, Box(220, 220, 300, 300));
}

SceneAnnotation single_object_scene() {
  return {"solo", 1280, 720, {object(kCar, Box(600, 300, 700, 380))}};
}

TEST(ProposeCrop, DeterministicUnderSeed) {
  const SceneAnnotation scene = single_object_scene();
  const CurationConfig cfg;
  Rng a = object_rng(9, "solo", 0), b = object_rng(9, "solo", 0);
  const auto s1 = propose_crop(scene, 0, cfg, a);
  const auto s2 = propose_crop(scene, 0, cfg, b);
  ASSERT_TRUE(s1 && s2);
  EXPECT_EQ(to_json_line(*s1), to_json_line(*s2));
  EXPECT_EQ(check_crop(*s1, scene, cfg), "");
}

TEST(ProposeCrop, ObjectLargerThanImageIsInfeasible) {
  const SceneAnnotation scene{"wide", 400, 200, {object(kBus, Box(10, 0, 390, 200))}};
  Rng rng = object_rng(1, "wide", 0);
  EXPECT_FALSE(propose_crop(scene, 0, CurationConfig{}, rng));
  const SceneCuration c = curate_scene(scene, CurationConfig{});
  EXPECT_TRUE(c.specs.empty());
  EXPECT_EQ(c.outcomes[0].skipped, SkipReason::NoFeasibleWindow);
}

TEST(SingleMainObject, OverlapBoundaries) {
  const CurationConfig cfg;
  CropSpec spec;
  spec.image_id = "s";
  spec.window = Box(0, 0, 200, 200);
  spec.main_object_index = 0;
  SceneAnnotation scene{"s", 1000, 1000, {object(kCar, Box(10, 10, 40, 40)), object(kCar, Box(500, 500, 600, 600))}};
  EXPECT_TRUE(single_main_object_check(spec, scene, cfg));
  scene.objects[1].box = Box(100, 100, 110, 130);  // 300 = 900 / 3
  EXPECT_TRUE(single_main_object_check(spec, scene, cfg));
  scene.objects[1].box = Box(100, 100, 115, 130);  // 450 = 900 / 2
  EXPECT_FALSE(single_main_object_check(spec, scene, cfg));
  // Only the part inside the window counts.
  scene.objects[1].box = Box(190, 100, 290, 130);
  EXPECT_TRUE(single_main_object_check(spec, scene, cfg));
}

TEST(TransformAnnotation, Scales) {
  const Box b(100, 100, 200, 200);
  EXPECT_EQ(transform_annotation(b, Box(0, 0, 512, 512)), Box(50, 50, 100, 100));
  EXPECT_EQ(transform_annotation(b, Box(0, 0, 256, 256)), b);
  EXPECT_EQ(transform_annotation(Box(10, 20, 30, 40), Box(0, 0, 128, 128)), Box(20, 40, 60, 80));
  EXPECT_EQ(transform_annotation(Box(60, 70, 80, 90), Box(50, 50, 178, 178)), Box(20, 40, 60, 80));
}

TEST(CurateScene, IsolatedObjectGivesOneSpec) {
  const SceneAnnotation scene = single_object_scene();
  const CurationConfig cfg;
  const SceneCuration c = curate_scene(scene, cfg);
  ASSERT_EQ(c.specs.size(), 1u);
  EXPECT_EQ(check_crop(c.specs[0], scene, cfg), "");
  EXPECT_FALSE(c.outcomes[0].skipped);
}

TEST(CurateScene, MutuallyOverlappingPairGivesNothing) {
  const SceneAnnotation scene{
      "pair", 1000, 1000, {object(kCar, Box(100, 100, 200, 200)), object(kCar, Box(120, 120, 220, 220))}};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CurationConfig cfg;
    cfg.rng_seed = seed;
    const SceneCuration c = curate_scene(scene, cfg);
    EXPECT_TRUE(c.specs.empty());
    for (const ObjectOutcome& o : c.outcomes) EXPECT_EQ(o.skipped, SkipReason::OverlapRule);
  }
}

TEST(CurateScene, SkipReasons) {
  CurationConfig cfg;
  cfg.class_remap = {{kTrafficLight, -1}, {kTruck, kCar}};
  const SceneAnnotation scene{"mix",
                              2000,
                              1000,
                              {object(kCar, Box(10, 10, 30, 40)), object(kCar, Box(300, 300, 400, 380), true),
                               object(kTrafficLight, Box(800, 100, 900, 200)),
                               object(kTruck, Box(1500, 500, 1600, 600))}};
  const SceneCuration c = curate_scene(scene, cfg);
  EXPECT_EQ(c.outcomes[0].skipped, SkipReason::TooSmall);
  EXPECT_EQ(c.outcomes[1].skipped, SkipReason::OccludedOrTruncated);
  EXPECT_EQ(c.outcomes[2].skipped, SkipReason::RemovedClass);
  EXPECT_FALSE(c.outcomes[3].skipped);
  ASSERT_EQ(c.specs.size(), 1u);
  EXPECT_EQ(c.specs[0].class_id, kCar);
  EXPECT_EQ(c.specs[0].main_object_index, 3u);
}

TEST(CurateScene, RemovedClassStillBlocksOverlap) {
  CurationConfig cfg;
  cfg.class_remap = {{kTrafficSign, -1}};
  const SceneAnnotation scene{
      "blk", 1000, 1000, {object(kCar, Box(100, 100, 200, 200)), object(kTrafficSign, Box(120, 120, 220, 220))}};
  const SceneCuration c = curate_scene(scene, cfg);
  EXPECT_TRUE(c.specs.empty());
  EXPECT_EQ(c.outcomes[0].skipped, SkipReason::OverlapRule);
}

TEST(CurateScene, RejectsObjectsOutsideImage) {
  const SceneAnnotation scene{"bad", 100, 100, {object(kCar, Box(50, 50, 150, 90))}};
  EXPECT_THROW(curate_scene(scene, CurationConfig{}), ValidationError);
}

TEST(CurateScene, RandomScenesPassBruteForceCheck) {
  std::mt19937_64 g(500);
  CurationConfig cfg;
  cfg.rng_seed = 17;
  std::size_t emitted = 0;
  for (std::size_t i = 0; i < 300; ++i) {
    const SceneAnnotation scene = random_scene(g, i);
    for (const CropSpec& s : curate_scene(scene, cfg).specs) {
      EXPECT_EQ(check_crop(s, scene, cfg), "") << to_json_line(s);
      ++emitted;
    }
  }
  EXPECT_GT(emitted, 100u);
}

TEST(CurateScene, PrefilterOrderDoesNotMatter) {
  std::mt19937_64 g(501);
  CurationConfig cfg;
  cfg.rng_seed = 3;
  for (std::size_t i = 0; i < 200; ++i) {
    const SceneAnnotation scene = random_scene(g, i);
    // Propose for every object first, filter afterwards.
    std::vector<CropSpec> late;
    for (std::size_t k = 0; k < scene.objects.size(); ++k) {
      Rng rng = object_rng(cfg.rng_seed, scene.image_id, k);
      const auto spec = propose_crop(scene, k, cfg, rng);
      if (!spec || !min_size_filter(scene.objects[k], cfg) || !passes_occlusion_policy(scene.objects[k], cfg)) continue;
      if (single_main_object_check(*spec, scene, cfg)) late.push_back(*spec);
    }
    EXPECT_EQ(curate_scene(scene, cfg).specs, late);
  }
}

TEST(CurateScenes, ThreadCountAndSerialization) {
  std::mt19937_64 g(502);
  std::vector<SceneAnnotation> scenes;
  for (std::size_t i = 0; i < 150; ++i) scenes.push_back(random_scene(g, i));
  CurationConfig cfg;
  cfg.rng_seed = 4;
  auto dump = [&](std::size_t threads) {
    std::string out;
    for (const auto& c : curate_scenes(scenes, cfg, threads)) {
      for (const auto& s : c.specs) out += to_json_line(s) + "\n";
    }
    return out;
  };
  const std::string one = dump(1);
  EXPECT_EQ(one, dump(3));
  EXPECT_EQ(one, dump(8));
  std::string back;
  for (const CropSpec& s : parse_crop_specs(one)) back += to_json_line(s) + "\n";
  EXPECT_EQ(back, one);

  std::string scene_text;
  for (const auto& s : scenes) scene_text += to_json_line(s) + "\n";
  const auto parsed = parse_scenes(scene_text, 2);
  ASSERT_EQ(parsed.size(), scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) EXPECT_EQ(to_json_line(parsed[i]), to_json_line(scenes[i]));
}

std::vector<CropSpec> population(int cls, std::size_t n) {
  std::vector<CropSpec> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].image_id = "c" + std::to_string(cls) + "-" + std::to_string(i);
    out[i].class_id = cls;
  }
  return out;
}

TEST(ClassCaps, TrainCounts) {
  std::vector<CropSpec> specs = population(kCar, 6000);
  const auto bikes = population(kBike, 1200);
  specs.insert(specs.end(), bikes.begin(), bikes.end());
  const CurationConfig cfg;
  const auto kept = apply_class_caps(specs, cfg);
  std::map<int, std::size_t> counts;
  for (const auto& s : kept) ++counts[s.class_id];
  EXPECT_EQ(counts[kCar], 5000u);
  EXPECT_EQ(counts[kBike], 1200u);
  EXPECT_EQ(apply_class_caps(specs, cfg), kept);
}

TEST(ClassCaps, SplitDefaultsAndOverrides) {
  CurationConfig cfg;
  cfg.split = Split::Test;
  EXPECT_EQ(apply_class_caps(population(kCar, 1500), cfg).size(), 1000u);
  cfg.class_caps[kCar] = 0;
  EXPECT_TRUE(apply_class_caps(population(kCar, 10), cfg).empty());
  cfg.class_caps[kCar] = 7;
  cfg.rng_seed = 1;
  const auto a = apply_class_caps(population(kCar, 100), cfg);
  cfg.rng_seed = 2;
  const auto b = apply_class_caps(population(kCar, 100), cfg);
  EXPECT_EQ(a.size(), 7u);
  EXPECT_NE(a, b);
}

TEST(ClassCaps, RoughlyUniform) {
  CurationConfig cfg;
  cfg.class_caps[kCar] = 50;
  std::vector<int> hits(100, 0);
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    cfg.rng_seed = seed;
    for (const auto& s : apply_class_caps(population(kCar, 100), cfg)) ++hits[std::stoul(s.image_id.substr(3))];
  }
  for (int h : hits) {
    EXPECT_GT(h, 140);
    EXPECT_LT(h, 260);
  }
}

TEST(CurationConfig, Validation) {
  CurationConfig cfg;
  cfg.overlap_ratio_max = 1.0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = {};
  cfg.max_expansion = 0.5;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

}  // namespace
}  // namespace shiftbench

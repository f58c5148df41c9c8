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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "shiftbench/error.hpp"
#include "test_util.hpp"

namespace shiftbench {
namespace {

using testing::random_box;

TEST(Box, RejectsInvertedCorners) {
  try {
    Box(10, 20, 5, 30);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("x1 < x2 violated"), std::string::npos);
  }
  EXPECT_THROW(Box(0, 5, 1, 5), ValidationError);
  EXPECT_THROW(Box(0, 0, 0, 1), ValidationError);
  EXPECT_THROW(Box(0, 0, NAN, 1), ValidationError);
}

TEST(Box, Accessors) {
  const Box b(10, 20, 30, 60);
  EXPECT_EQ(b.width(), 20);
  EXPECT_EQ(b.height(), 40);
  EXPECT_EQ(b.area(), 800);
  EXPECT_EQ(b.center_x(), 20);
  EXPECT_EQ(b.center_y(), 40);
}

TEST(Iou, Examples) {
  const Box b(3, 4, 17, 9);
  EXPECT_EQ(iou(b, b), 1.0);
  EXPECT_EQ(iou(Box(0, 0, 1, 1), Box(2, 2, 3, 3)), 0.0);
  EXPECT_NEAR(iou(Box(0, 0, 2, 2), Box(1, 1, 3, 3)), 1.0 / 7.0, 1e-15);
  // Touching edges share no area.
  EXPECT_EQ(iou(Box(0, 0, 1, 1), Box(1, 0, 2, 1)), 0.0);
}

TEST(Iou, SymmetricAndBounded) {
  std::mt19937_64 g(11);
  for (int i = 0; i < 2000; ++i) {
    const Box a = random_box(g), b = random_box(g);
    const double ab = iou(a, b);
    EXPECT_EQ(ab, iou(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
  }
}

// Counts unit pixels covered by integer-coordinate boxes.
double raster_iou(const Box& a, const Box& b) {
  const int lo_x = static_cast<int>(std::min(a.x1(), b.x1())), hi_x = static_cast<int>(std::max(a.x2(), b.x2()));
  const int lo_y = static_cast<int>(std::min(a.y1(), b.y1())), hi_y = static_cast<int>(std::max(a.y2(), b.y2()));
  long inter = 0, uni = 0;
  for (int y = lo_y; y < hi_y; ++y) {
    for (int x = lo_x; x < hi_x; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      const bool in_a = px > a.x1() && px < a.x2() && py > a.y1() && py < a.y2();
      const bool in_b = px > b.x1() && px < b.x2() && py > b.y1() && py < b.y2();
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  }
  return static_cast<double>(inter) / static_cast<double>(uni);
}

TEST(Iou, AgreesWithRasterization) {
  std::mt19937_64 g(2026);
  std::uniform_int_distribution<int> coord(0, 60);
  for (int i = 0; i < 200; ++i) {
    auto make = [&] {
      int x1 = coord(g), x2 = coord(g), y1 = coord(g), y2 = coord(g);
      if (x1 == x2) ++x2;
      if (y1 == y2) ++y2;
      return Box(std::min(x1, x2), std::min(y1, y2), std::max(x1, x2), std::max(y1, y2));
    };
    const Box a = make(), b = make();
    EXPECT_NEAR(iou(a, b), raster_iou(a, b), 1e-9);
  }
}

TEST(BoxMae, Examples) {
  const Box b(10, 10, 50, 70);
  EXPECT_EQ(box_mae(b, b), 0.0);
  EXPECT_EQ(box_mae(Box(14, 14, 54, 74), b), 4.0);
  EXPECT_EQ(box_mae(Box(11, 12, 53, 76), b), 3.0);
}

TEST(BoxMae, SymmetricAndTriangle) {
  std::mt19937_64 g(5);
  for (int i = 0; i < 1000; ++i) {
    const Box a = random_box(g), b = random_box(g), c = random_box(g);
    EXPECT_EQ(box_mae(a, b), box_mae(b, a));
    EXPECT_LE(box_mae(a, c), box_mae(a, b) + box_mae(b, c) + 1e-12);
  }
}

TEST(ClipArea, Examples) {
  const Box window(0, 0, 100, 100);
  EXPECT_EQ(clip_area_in_window(Box(10, 10, 20, 30), window), 200.0);
  EXPECT_EQ(clip_area_in_window(Box(200, 200, 210, 210), window), 0.0);
  EXPECT_EQ(clip_area_in_window(Box(0, 0, 4, 4), Box(2, 2, 10, 10)), 4.0);
}

TEST(Encode, CenterPoint) {
  const BoxEncoding e = encode_box(Box(10, 20, 30, 60), BoxKind::CenterPoint);
  EXPECT_EQ(e.kind, BoxKind::CenterPoint);
  EXPECT_EQ(e.values, (std::array<double, 4>{20, 40, 20, 40}));
}

TEST(Encode, AnchorIdentityIsZero) {
  const Box b(96, 112, 160, 144);
  const BoxEncoding e = encode_box(b, BoxKind::AnchorOffsets, AnchorSpec::from_box(b));
  EXPECT_EQ(e.values, (std::array<double, 4>{0, 0, 0, 0}));
}

TEST(Encode, TwiceAnchorWidthGivesLn2) {
  const AnchorSpec anchor{128, 128, 64, 32};
  const BoxEncoding e = encode_box(Box(64, 112, 192, 144), BoxKind::AnchorOffsets, anchor);
  // Tuple order is (tx, ty, th, tw).
  EXPECT_EQ(e.values[0], 0.0);
  EXPECT_EQ(e.values[1], 0.0);
  EXPECT_EQ(e.values[2], 0.0);
  EXPECT_NEAR(e.values[3], std::log(2.0), 1e-15);
}

TEST(Encode, AnchorRequired) {
  EXPECT_THROW(encode_box(Box(0, 0, 1, 1), BoxKind::AnchorOffsets), ValidationError);
  EXPECT_THROW(decode_box({BoxKind::AnchorOffsets, {0, 0, 0, 0}}), ValidationError);
  EXPECT_THROW(AnchorSpec({0, 0, 0, 1}).validate(), ValidationError);
}

TEST(Decode, ZeroOffsetsReturnAnchor) {
  const AnchorSpec anchor{128, 128, 64, 32};
  const Box b = decode_box({BoxKind::AnchorOffsets, {0, 0, 0, 0}}, anchor);
  EXPECT_EQ(b, Box(96, 112, 160, 144));
}

TEST(Decode, CenterOffsetScalesByAnchorWidth) {
  const AnchorSpec anchor{128, 128, 64, 32};
  const Box b = decode_box({BoxKind::AnchorOffsets, {0.5, 0, 0, 0}}, anchor);
  EXPECT_EQ(b.center_x(), 160.0);
  EXPECT_EQ(b.width(), 64.0);
}

TEST(Decode, NonPositiveCenterPointSize) {
  EXPECT_THROW(decode_box({BoxKind::CenterPoint, {10, 10, 0, 5}}), ValidationError);
  EXPECT_THROW(decode_box({BoxKind::CenterPoint, {10, 10, 5, -1}}), ValidationError);
}

TEST(Decode, RoundTripAllKinds) {
  std::mt19937_64 g(99);
  const AnchorSpec anchor{120, 130, 70, 45};
  for (BoxKind kind : {BoxKind::CornerPoints, BoxKind::CenterPoint, BoxKind::AnchorOffsets}) {
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const Box b = random_box(g);
      const Box back = decode_box(encode_box(b, kind, anchor), anchor);
      for (std::size_t k = 0; k < 4; ++k) worst = std::max(worst, std::abs(back.corners()[k] - b.corners()[k]));
    }
    EXPECT_LT(worst, 1e-9) << to_string(kind);
  }
}

TEST(MeanAnchor, AveragesCentersAndSizes) {
  const std::vector<Box> boxes{Box(0, 0, 10, 20), Box(10, 10, 30, 50)};
  const AnchorSpec a = mean_anchor(boxes);
  EXPECT_EQ(a.center_x, 12.5);
  EXPECT_EQ(a.center_y, 20.0);
  EXPECT_EQ(a.width, 15.0);
  EXPECT_EQ(a.height, 30.0);
}

}  // namespace
}  // namespace shiftbench

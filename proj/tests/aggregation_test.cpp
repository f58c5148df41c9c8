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

#include "shiftbench/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "shiftbench/error.hpp"

namespace shiftbench {
namespace {

SampleSet make_set(std::vector<std::vector<double>> probs, std::vector<std::array<double, 4>> boxes = {}) {
  SampleSet s{"img", "mc", {}};
  const std::size_t n = std::max(probs.size(), boxes.size());
  for (std::size_t t = 0; t < n; ++t) {
    PredictionRecord r{"img", "mc", static_cast<int>(t), std::nullopt, std::nullopt};
    if (t < probs.size()) r.class_probs = probs[t];
    if (t < boxes.size()) r.box = boxes[t];
    s.records.push_back(r);
  }
  return s;
}

std::vector<double> random_simplex(std::mt19937_64& g, std::size_t c) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(c);
  double s = 0;
  for (double& v : p) s += (v = e(g));
  for (double& v : p) v /= s;
  return p;
}

TEST(AggregateClassification, SinglePassIsIdentity) {
  const std::vector<double> p{0.1, 0.6, 0.3};
  const auto c = aggregate_classification(make_set({p}));
  EXPECT_EQ(c.mean_probs, p);
  EXPECT_EQ(c.predicted_class, 1);
  EXPECT_EQ(c.confidence, 0.6);
}

TEST(AggregateClassification, TieGoesToLowestIndex) {
  const auto c = aggregate_classification(make_set({{1.0, 0.0}, {0.0, 1.0}}));
  EXPECT_EQ(c.mean_probs, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(c.predicted_class, 0);
  EXPECT_EQ(c.confidence, 0.5);
}

TEST(AggregateClassification, IdenticalPassesExact) {
  std::mt19937_64 g(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> p = random_simplex(g, 7);
    const auto c = aggregate_classification(make_set(std::vector<std::vector<double>>(20, p)));
    EXPECT_EQ(c.mean_probs, p);
    for (double v : c.prob_variance) EXPECT_EQ(v, 0.0);
  }
}

TEST(AggregateClassification, MissingProbsIsError) {
  SampleSet s = make_set({{1.0}, {1.0}});
  s.records[1].class_probs.reset();
  EXPECT_THROW(aggregate_classification(s), ValidationError);
  s.records[1].box = std::array<double, 4>{0, 0, 1, 1};
  EXPECT_THROW(aggregate(s), ValidationError);
}

TEST(AggregateRegression, TwoPassVariance) {
  const auto r = aggregate_regression(make_set({}, {{10, 0, 20, 5}, {14, 0, 20, 5}}));
  EXPECT_EQ(r.mean_box[0], 12.0);
  EXPECT_EQ(r.box_variance[0], 4.0);
  EXPECT_EQ(r.box_variance[1], 0.0);
}

TEST(AggregateRegression, IdenticalPassesZeroVariance) {
  const std::array<double, 4> b{12.3, 45.6, 78.9, 101.1};
  const auto r = aggregate_regression(make_set({}, std::vector<std::array<double, 4>>(20, b)));
  EXPECT_EQ(r.mean_box, b);
  EXPECT_EQ(r.box_variance, (std::array<double, 4>{0, 0, 0, 0}));
}

TEST(AggregateRegression, FiveMembersPopulationVariance) {
  std::vector<std::array<double, 4>> boxes;
  for (double v : {1.0, 2.0, 3.0, 4.0, 5.0}) boxes.push_back({v, v, v + 10, v + 10});
  const auto r = aggregate_regression(make_set({}, boxes));
  EXPECT_EQ(r.mean_box[0], 3.0);
  EXPECT_NEAR(r.box_variance[0], 2.0, 1e-15);  // divide by M, not M - 1
}

TEST(AggregateRegression, MissingBoxIsError) {
  SampleSet s = make_set({}, {{0, 0, 1, 1}, {0, 0, 1, 1}});
  s.records[0].box.reset();
  s.records[0].class_probs = std::vector<double>{1.0};
  EXPECT_THROW(aggregate_regression(s), ValidationError);
}

TEST(Aggregate, PermutationInvariant) {
  std::mt19937_64 g(21);
  std::uniform_real_distribution<double> u(0.0, 200.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> probs;
    std::vector<std::array<double, 4>> boxes;
    for (int t = 0; t < 20; ++t) {
      probs.push_back(random_simplex(g, 7));
      const double x = u(g), y = u(g);
      boxes.push_back({x, y, x + 20 + u(g), y + 20 + u(g)});
    }
    SampleSet s = make_set(probs, boxes);
    const AggregatedPrediction base = aggregate(s);
    std::shuffle(s.records.begin(), s.records.end(), g);
    const AggregatedPrediction shuffled = aggregate(s);
    // Relabelled passes reduce identically too.
    for (std::size_t i = 0; i < s.records.size(); ++i) s.records[i].pass_id = static_cast<int>(i);
    const AggregatedPrediction relabelled = aggregate(s);
    for (const AggregatedPrediction* other : {&shuffled, &relabelled}) {
      EXPECT_EQ(*base.mean_probs, *other->mean_probs);
      EXPECT_EQ(*base.mean_box, *other->mean_box);
      EXPECT_EQ(*base.box_variance, *other->box_variance);
    }
  }
}

TEST(Aggregate, SimplexAndTranslationInvariance) {
  std::mt19937_64 g(31);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<double>> probs;
    std::vector<std::array<double, 4>> boxes, shifted;
    const double shift = u(g) * 50 - 2500;
    for (int t = 0; t < 5; ++t) {
      probs.push_back(random_simplex(g, 4));
      const std::array<double, 4> b{u(g), u(g), 100 + u(g), 100 + u(g)};
      boxes.push_back(b);
      shifted.push_back({b[0] + shift, b[1] + shift, b[2] + shift, b[3] + shift});
    }
    const AggregatedPrediction a = aggregate(make_set(probs, boxes));
    double sum = 0;
    for (double v : *a.mean_probs) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-9);
    const AggregatedPrediction b = aggregate(make_set(probs, shifted));
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR((*a.box_variance)[k], (*b.box_variance)[k], 1e-9);
  }
}

TEST(Aggregate, MCopiesReproduceMember) {
  const std::vector<double> p{0.05, 0.15, 0.8};
  const std::array<double, 4> b{3.3, 4.4, 55.5, 66.6};
  for (std::size_t m : {1u, 5u, 20u}) {
    const auto a = aggregate(make_set(std::vector<std::vector<double>>(m, p), std::vector<std::array<double, 4>>(m, b)));
    EXPECT_EQ(a.pass_count, m);
    EXPECT_EQ(*a.mean_probs, p);
    EXPECT_EQ(*a.mean_box, b);
    EXPECT_EQ(*a.box_variance, (std::array<double, 4>{0, 0, 0, 0}));
  }
}

TEST(Aggregate, DegenerateMeanBoxFlagged) {
  const auto a = aggregate(make_set({}, {{10, 0, 5, 5}, {10, 0, 5, 5}}));
  EXPECT_FALSE(a.has_valid_mean_box());
}

TEST(AggregateAll, ThreadCountDoesNotMatter) {
  std::mt19937_64 g(6);
  std::vector<SampleSet> sets;
  for (int i = 0; i < 300; ++i) {
    std::vector<std::vector<double>> probs;
    for (int t = 0; t < 20; ++t) probs.push_back(random_simplex(g, 7));
    SampleSet s = make_set(probs);
    s.image_id = "im" + std::to_string(i);
    sets.push_back(s);
  }
  const auto one = aggregate_all(sets, 1);
  const auto many = aggregate_all(sets, 8);
  ASSERT_EQ(one.size(), many.size());
  for (std::size_t i = 0; i < one.size(); ++i) EXPECT_EQ(to_json_line(one[i]), to_json_line(many[i]));
}

TEST(AggregatedJson, RoundTripAndValidation) {
  const auto a = aggregate(make_set({{0.2, 0.8}, {0.4, 0.6}}, {{1, 2, 30, 40}, {3, 4, 32, 44}}));
  const std::string line = to_json_line(a);
  for (const char* key : {"image_id", "method", "mean_probs", "predicted_class", "confidence", "mean_box",
                          "box_variance", "pass_count"}) {
    EXPECT_NE(line.find(std::string("\"") + key + "\""), std::string::npos) << key;
  }
  const auto back = parse_aggregated(line);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(to_json_line(back[0]), line);
  EXPECT_THROW(parse_aggregated(R"({"image_id":"a","method":"m","pass_count":1,"mean_probs":[0.2,0.8],"predicted_class":0,"confidence":0.2})"),
               ValidationError);
}

}  // namespace
}  // namespace shiftbench

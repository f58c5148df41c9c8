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

#include "shiftbench/records.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <tuple>

#include "jsonl.hpp"
#include "shiftbench/error.hpp"

namespace shiftbench {
namespace {

using jsonl::Json;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

GroundTruthRecord decode_ground_truth(const Json& j) {
  const std::array<double, 4> c = jsonl::get_box(jsonl::require(j, "box"), "box");
  // Validate the raw corners before constructing the box so the field is named.
  if (!(c[0] < c[2])) throw ValidationError("box: x1 < x2 violated");
  if (!(c[1] < c[3])) throw ValidationError("box: y1 < y2 violated");
  GroundTruthRecord r{
      .image_id = jsonl::get_string(j, "image_id"),
      .dataset = jsonl::get_string(j, "dataset"),
      .class_id = jsonl::get_int_field(j, "class_id"),
      .num_classes = jsonl::get_int_field(j, "num_classes"),
      .box = Box(c),
      .occluded = jsonl::get_bool_or(j, "occluded", false),
      .truncated = jsonl::get_bool_or(j, "truncated", false),
  };
  validate(r);
  return r;
}

PredictionRecord decode_prediction(const Json& j) {
  PredictionRecord r;
  r.image_id = jsonl::get_string(j, "image_id");
  r.method = jsonl::get_string(j, "method");
  r.pass_id = jsonl::get_int_field(j, "pass_id");
  if (jsonl::has(j, "class_probs")) r.class_probs = jsonl::get_number_array(j["class_probs"], "class_probs");
  if (jsonl::has(j, "box")) r.box = jsonl::get_box(j["box"], "box");
  validate(r);
  return r;
}

}  // namespace

void validate(const GroundTruthRecord& r) {
  if (r.image_id.empty()) throw ValidationError("image_id must not be empty");
  if (r.dataset.empty()) throw ValidationError("dataset must not be empty");
  if (r.num_classes < 1) throw ValidationError("num_classes must be >= 1");
  if (r.class_id != kNoClass && (r.class_id < 0 || r.class_id >= r.num_classes)) {
    throw ValidationError("class_id " + std::to_string(r.class_id) + " outside [0, " +
                          std::to_string(r.num_classes) + ")");
  }
  const Box& b = r.box;
  if (!(b.x1() >= 0.0)) throw ValidationError("box: 0 <= x1 violated");
  if (!(b.y1() >= 0.0)) throw ValidationError("box: 0 <= y1 violated");
  if (!(b.x2() <= kCropSize)) throw ValidationError("box: x2 <= 256 violated");
  if (!(b.y2() <= kCropSize)) throw ValidationError("box: y2 <= 256 violated");
}

void validate(const PredictionRecord& r) {
  if (r.image_id.empty()) throw ValidationError("image_id must not be empty");
  if (r.method.empty()) throw ValidationError("method must not be empty");
  if (r.pass_id < 0) throw ValidationError("pass_id must be >= 0");
  if (!r.class_probs && !r.box) throw ValidationError("record has neither class_probs nor box");
  if (r.class_probs) {
    const auto& p = *r.class_probs;
    if (p.empty()) throw ValidationError("class_probs must not be empty");
    double sum = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
      if (!std::isfinite(p[c])) throw ValidationError("class_probs entry is not finite");
      if (p[c] < 0.0) throw ValidationError("class_probs[" + std::to_string(c) + "] is negative");
      sum += p[c];
    }
    if (std::abs(sum - 1.0) > kSimplexTolerance) {
      throw ValidationError("class_probs sum " + fmt_double(sum) + " is not 1 within 1e-6");
    }
  }
  if (r.box) {
    for (double v : *r.box) {
      if (!std::isfinite(v)) throw ValidationError("box coordinate is not finite");
    }
  }
}

std::vector<GroundTruthRecord> parse_ground_truth(std::string_view text, std::size_t threads) {
  return jsonl::parse_lines<GroundTruthRecord>(text, threads, decode_ground_truth);
}

std::vector<GroundTruthRecord> parse_ground_truth(std::istream& in, std::size_t threads) {
  const std::string text = jsonl::slurp(in);
  return parse_ground_truth(std::string_view(text), threads);
}

std::vector<PredictionRecord> parse_predictions(std::string_view text, std::size_t threads) {
  return jsonl::parse_lines<PredictionRecord>(text, threads, decode_prediction);
}

std::vector<PredictionRecord> parse_predictions(std::istream& in, std::size_t threads) {
  const std::string text = jsonl::slurp(in);
  return parse_predictions(std::string_view(text), threads);
}

std::string to_json_line(const GroundTruthRecord& r) {
  Json j = Json::object();
  j["image_id"] = r.image_id;
  j["dataset"] = r.dataset;
  j["class_id"] = r.class_id;
  j["num_classes"] = r.num_classes;
  j["box"] = r.box.corners();
  j["occluded"] = r.occluded;
  j["truncated"] = r.truncated;
  return j.dump();
}

std::string to_json_line(const PredictionRecord& r) {
  Json j = Json::object();
  j["image_id"] = r.image_id;
  j["method"] = r.method;
  j["pass_id"] = r.pass_id;
  if (r.class_probs) j["class_probs"] = *r.class_probs;
  if (r.box) j["box"] = *r.box;
  return j.dump();
}

std::vector<SampleSet> group_samples(std::vector<PredictionRecord> predictions) {
  std::sort(predictions.begin(), predictions.end(), [](const PredictionRecord& a, const PredictionRecord& b) {
    return std::tie(a.image_id, a.method, a.pass_id) < std::tie(b.image_id, b.method, b.pass_id);
  });
  std::vector<SampleSet> groups;
  std::size_t width = 0;  // class count seen in the current group, 0 = none yet
  for (auto& r : predictions) {
    if (groups.empty() || groups.back().image_id != r.image_id || groups.back().method != r.method) {
      groups.push_back(SampleSet{r.image_id, r.method, {}});
      width = 0;
    }
    SampleSet& g = groups.back();
    if (!g.records.empty() && g.records.back().pass_id == r.pass_id) {
      throw ValidationError("duplicate pass_id " + std::to_string(r.pass_id) + " for image '" +
                            r.image_id + "', method '" + r.method + "'");
    }
    if (r.class_probs) {
      if (width != 0 && width != r.class_probs->size()) {
        throw ValidationError("class_probs length differs within image '" + r.image_id +
                              "', method '" + r.method + "'");
      }
      width = r.class_probs->size();
    }
    g.records.push_back(std::move(r));
  }
  return groups;
}

GroundTruthIndex::GroundTruthIndex(std::span<const GroundTruthRecord> records)
    : records_(records.begin(), records.end()) {
  index_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!index_.emplace(records_[i].image_id, i).second) {
      throw ValidationError("duplicate ground truth for image_id '" + records_[i].image_id + "'");
    }
  }
}

const GroundTruthRecord* GroundTruthIndex::find(std::string_view image_id) const {
  auto it = index_.find(image_id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

const GroundTruthRecord& GroundTruthIndex::at(std::string_view image_id) const {
  if (const GroundTruthRecord* r = find(image_id)) return *r;
  throw ValidationError("missing ground truth for image_id '" + std::string(image_id) + "'");
}

}  // namespace shiftbench

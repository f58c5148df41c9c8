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
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <string>
#include <string_view>
#include <vector>

#include "shiftbench/box.hpp"

namespace shiftbench {

// class_id of records that belong to no trained class (OoD objects).
inline constexpr int kNoClass = -1;
// Side of the square crop frame all ground-truth boxes live in.
inline constexpr double kCropSize = 256.0;
// Allowed |sum(p) - 1| for an exported probability vector.
inline constexpr double kSimplexTolerance = 1e-6;

struct GroundTruthRecord {
  std::string image_id;
  std::string dataset;
  int class_id = kNoClass;
  int num_classes = 1;
  Box box{0.0, 0.0, 1.0, 1.0};
  bool occluded = false;
  bool truncated = false;

  bool has_class() const noexcept { return class_id != kNoClass; }
  friend bool operator==(const GroundTruthRecord&, const GroundTruthRecord&) = default;
};

// One model output for one image under one method and one stochastic pass
// (MC-Dropout repetition or ensemble member).
struct PredictionRecord {
  std::string image_id;
  std::string method;
  int pass_id = 0;
  std::optional<std::vector<double>> class_probs;
  // Corner points; individual passes are not required to be well-formed boxes.
  std::optional<std::array<double, 4>> box;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

// All passes for one (image, method) pair, ordered by pass_id.
struct SampleSet {
  std::string image_id;
  std::string method;
  std::vector<PredictionRecord> records;

  std::size_t pass_count() const noexcept { return records.size(); }
};

// Throw ValidationError naming the violated field.
void validate(const GroundTruthRecord& r);
void validate(const PredictionRecord& r);

// JSON Lines readers. Blank lines are skipped; errors are ParseError with the
// 1-based line number. Lines are parsed on up to `threads` workers (0 = all).
std::vector<GroundTruthRecord> parse_ground_truth(std::string_view text, std::size_t threads = 1);
std::vector<GroundTruthRecord> parse_ground_truth(std::istream& in, std::size_t threads = 1);
std::vector<PredictionRecord> parse_predictions(std::string_view text, std::size_t threads = 1);
std::vector<PredictionRecord> parse_predictions(std::istream& in, std::size_t threads = 1);

// Single-line JSON encodings (no trailing newline).
std::string to_json_line(const GroundTruthRecord& r);
std::string to_json_line(const PredictionRecord& r);

// One SampleSet per distinct (image_id, method), sorted by that key, records
// sorted by pass_id. The result does not depend on input order.
// Throws ValidationError on a duplicate pass_id or mixed class counts in a group.
std::vector<SampleSet> group_samples(std::vector<PredictionRecord> predictions);

// image_id -> ground truth lookup used to join predictions with labels.
class GroundTruthIndex {
 public:
  // Throws ValidationError on duplicate image_ids.
  explicit GroundTruthIndex(std::span<const GroundTruthRecord> records);
  // The index holds views into its own records; copying would dangle them.
  GroundTruthIndex(const GroundTruthIndex&) = delete;
  GroundTruthIndex& operator=(const GroundTruthIndex&) = delete;
  GroundTruthIndex(GroundTruthIndex&&) noexcept = default;
  GroundTruthIndex& operator=(GroundTruthIndex&&) noexcept = default;

  // nullptr when absent.
  const GroundTruthRecord* find(std::string_view image_id) const;
  // Throws ValidationError naming the image when absent.
  const GroundTruthRecord& at(std::string_view image_id) const;
  std::size_t size() const noexcept { return records_.size(); }

 private:
  std::vector<GroundTruthRecord> records_;
  std::unordered_map<std::string_view, std::size_t> index_;
};

}  // namespace shiftbench

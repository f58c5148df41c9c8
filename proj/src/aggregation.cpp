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

#include "jsonl.hpp"
#include "shiftbench/error.hpp"
#include "shiftbench/kernels.hpp"
#include "shiftbench/parallel.hpp"

namespace shiftbench {
namespace {

using jsonl::Json;

std::string where(const SampleSet& s) { return "image '" + s.image_id + "', method '" + s.method + "'"; }

// Passes are exchangeable; reducing them in lexicographic row order makes the
// result bit-identical under any reordering or relabelling of passes.
template <typename Row>
void sort_rows(std::vector<const Row*>& rows) {
  auto less = [](const Row* a, const Row* b) {
    return std::lexicographical_compare(a->begin(), a->end(), b->begin(), b->end());
  };
  if (!std::is_sorted(rows.begin(), rows.end(), less)) std::sort(rows.begin(), rows.end(), less);
}

}  // namespace

bool AggregatedPrediction::has_valid_mean_box() const noexcept {
  if (!mean_box) return false;
  const auto& b = *mean_box;
  return b[0] < b[2] && b[1] < b[3];
}

std::size_t argmax_lowest(std::span<const double> p) noexcept {
  std::size_t best = 0;
  for (std::size_t c = 1; c < p.size(); ++c) {
    if (p[c] > p[best]) best = c;
  }
  return best;
}

ClassificationAggregate aggregate_classification(const SampleSet& s) {
  if (s.records.empty()) throw ValidationError("empty sample set for " + where(s));
  const std::size_t passes = s.records.size();
  const std::size_t width = s.records.front().class_probs ? s.records.front().class_probs->size() : 0;
  std::vector<const std::vector<double>*> order;
  order.reserve(passes);
  for (const PredictionRecord& r : s.records) {
    if (!r.class_probs) throw ValidationError("pass " + std::to_string(r.pass_id) + " lacks class_probs for " + where(s));
    if (r.class_probs->size() != width) throw ValidationError("class_probs length differs for " + where(s));
    order.push_back(&*r.class_probs);
  }
  sort_rows(order);
  std::vector<double> rows;
  rows.reserve(passes * width);
  for (const auto* p : order) rows.insert(rows.end(), p->begin(), p->end());
  ClassificationAggregate out;
  out.mean_probs.resize(width);
  out.prob_variance.resize(width);
  kernels::active_kernels().pass_moments(rows, passes, width, out.mean_probs, out.prob_variance);
  out.predicted_class = static_cast<int>(argmax_lowest(out.mean_probs));
  out.confidence = out.mean_probs[static_cast<std::size_t>(out.predicted_class)];
  return out;
}

RegressionAggregate aggregate_regression(const SampleSet& s) {
  if (s.records.empty()) throw ValidationError("empty sample set for " + where(s));
  const std::size_t passes = s.records.size();
  std::vector<const std::array<double, 4>*> order;
  order.reserve(passes);
  for (const PredictionRecord& r : s.records) {
    if (!r.box) throw ValidationError("pass " + std::to_string(r.pass_id) + " lacks a box for " + where(s));
    order.push_back(&*r.box);
  }
  sort_rows(order);
  std::vector<double> rows;
  rows.reserve(passes * 4);
  for (const auto* b : order) rows.insert(rows.end(), b->begin(), b->end());
  RegressionAggregate out;
  kernels::active_kernels().pass_moments(rows, passes, 4, out.mean_box, out.box_variance);
  for (double& v : out.box_variance) v = std::max(v, 0.0);
  return out;
}

AggregatedPrediction aggregate(const SampleSet& s) {
  if (s.records.empty()) throw ValidationError("empty sample set for " + where(s));
  const std::size_t with_probs = static_cast<std::size_t>(std::count_if(
      s.records.begin(), s.records.end(), [](const PredictionRecord& r) { return r.class_probs.has_value(); }));
  const std::size_t with_box = static_cast<std::size_t>(std::count_if(
      s.records.begin(), s.records.end(), [](const PredictionRecord& r) { return r.box.has_value(); }));
  const std::size_t n = s.records.size();
  if (with_probs != 0 && with_probs != n) throw ValidationError("class_probs missing on some passes for " + where(s));
  if (with_box != 0 && with_box != n) throw ValidationError("box missing on some passes for " + where(s));

  AggregatedPrediction a;
  a.image_id = s.image_id;
  a.method = s.method;
  a.pass_count = n;
  if (with_probs == n) {
    ClassificationAggregate c = aggregate_classification(s);
    a.predicted_class = c.predicted_class;
    a.confidence = c.confidence;
    a.mean_probs = std::move(c.mean_probs);
    a.class_prob_variance = std::move(c.prob_variance);
  }
  if (with_box == n) {
    const RegressionAggregate r = aggregate_regression(s);
    a.mean_box = r.mean_box;
    a.box_variance = r.box_variance;
  }
  return a;
}

std::vector<AggregatedPrediction> aggregate_all(std::span<const SampleSet> sets, std::size_t threads) {
  std::vector<AggregatedPrediction> out(sets.size());
  parallel_for(sets.size(), threads, [&](std::size_t i) { out[i] = aggregate(sets[i]); });
  return out;
}

std::string to_json_line(const AggregatedPrediction& a) {
  Json j = Json::object();
  j["image_id"] = a.image_id;
  j["method"] = a.method;
  if (a.mean_probs) {
    j["mean_probs"] = *a.mean_probs;
    j["predicted_class"] = *a.predicted_class;
    j["confidence"] = *a.confidence;
  }
  if (a.mean_box) {
    j["mean_box"] = *a.mean_box;
    j["box_variance"] = *a.box_variance;
  }
  j["pass_count"] = a.pass_count;
  if (a.class_prob_variance) j["class_prob_variance"] = *a.class_prob_variance;
  return j.dump();
}

namespace {

AggregatedPrediction decode_aggregated(const Json& j) {
  AggregatedPrediction a;
  a.image_id = jsonl::get_string(j, "image_id");
  a.method = jsonl::get_string(j, "method");
  const int passes = jsonl::get_int_field(j, "pass_count");
  if (passes < 1) throw ValidationError("pass_count must be >= 1");
  a.pass_count = static_cast<std::size_t>(passes);

  if (jsonl::has(j, "mean_probs")) {
    std::vector<double> p = jsonl::get_number_array(j["mean_probs"], "mean_probs");
    if (p.empty()) throw ValidationError("mean_probs must not be empty");
    double sum = 0.0;
    for (double v : p) {
      if (v < 0.0) throw ValidationError("mean_probs entry is negative");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSimplexTolerance) throw ValidationError("mean_probs is not on the simplex");
    const std::size_t best = argmax_lowest(p);
    if (jsonl::has(j, "predicted_class") &&
        jsonl::get_int_field(j, "predicted_class") != static_cast<int>(best)) {
      throw ValidationError("predicted_class does not match argmax of mean_probs");
    }
    a.predicted_class = static_cast<int>(best);
    a.confidence = p[best];
    a.mean_probs = std::move(p);
    if (jsonl::has(j, "class_prob_variance")) {
      a.class_prob_variance = jsonl::get_number_array(j["class_prob_variance"], "class_prob_variance");
    }
  }
  if (jsonl::has(j, "mean_box")) {
    a.mean_box = jsonl::get_box(j["mean_box"], "mean_box");
    std::array<double, 4> var{};
    if (jsonl::has(j, "box_variance")) var = jsonl::get_box(j["box_variance"], "box_variance");
    for (double v : var) {
      if (v < 0.0) throw ValidationError("box_variance entry is negative");
    }
    a.box_variance = var;
  }
  if (!a.mean_probs && !a.mean_box) throw ValidationError("record has neither mean_probs nor mean_box");
  return a;
}

}  // namespace

std::vector<AggregatedPrediction> parse_aggregated(std::string_view text, std::size_t threads) {
  return jsonl::parse_lines<AggregatedPrediction>(text, threads, decode_aggregated);
}

}  // namespace shiftbench

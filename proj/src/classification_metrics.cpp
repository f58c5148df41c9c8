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

#include "shiftbench/classification_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "shiftbench/error.hpp"
#include "shiftbench/kernels.hpp"

namespace shiftbench {
namespace {

double bin_edge(std::size_t k, std::size_t bins) {
  return k >= bins ? 1.0 : static_cast<double>(k) / static_cast<double>(bins);
}

void require_nonempty(std::size_t n) {
  if (n == 0) throw ValidationError("empty evaluation set");
}

double mean_of(std::span<const double> x) {
  return kernels::active_kernels().sum(x).total() / static_cast<double>(x.size());
}

}  // namespace

ClassificationSamples join_classification(std::span<const AggregatedPrediction> agg,
                                          const GroundTruthIndex& gt) {
  ClassificationSamples s;
  s.confidence.reserve(agg.size());
  s.correct.reserve(agg.size());
  s.true_class_prob.reserve(agg.size());
  s.brier_term.reserve(agg.size());
  for (const AggregatedPrediction& a : agg) {
    const GroundTruthRecord& truth = gt.at(a.image_id);
    if (!truth.has_class()) {
      ++s.skipped_ood;
      continue;
    }
    if (!a.mean_probs) {
      throw ValidationError("prediction for image '" + a.image_id + "', method '" + a.method +
                            "' has no class probabilities");
    }
    const std::vector<double>& p = *a.mean_probs;
    if (p.size() != static_cast<std::size_t>(truth.num_classes)) {
      throw ValidationError("image '" + a.image_id + "': " + std::to_string(p.size()) +
                            " class probabilities but num_classes is " + std::to_string(truth.num_classes));
    }
    const auto y = static_cast<std::size_t>(truth.class_id);
    double b = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
      const double d = p[c] - (c == y ? 1.0 : 0.0);
      b += d * d;
    }
    s.confidence.push_back(*a.confidence);
    s.correct.push_back(*a.predicted_class == truth.class_id ? 1 : 0);
    s.true_class_prob.push_back(p[y]);
    s.brier_term.push_back(b);
  }
  return s;
}

std::size_t reliability_bin(double confidence, std::size_t bins) noexcept {
  if (bins == 0) return 0;
  const double scaled = std::floor(confidence * static_cast<double>(bins));
  std::size_t k = scaled <= 0.0 ? 0 : std::min(bins - 1, static_cast<std::size_t>(scaled));
  // floor(c * B) can land one bin off the computed edges; snap to them.
  if (k > 0 && confidence < bin_edge(k, bins)) --k;
  if (k + 1 < bins && confidence >= bin_edge(k + 1, bins)) ++k;
  return k;
}

CalibrationResult calibration_error(std::span<const double> confidence,
                                    std::span<const std::uint8_t> correct, std::size_t bins) {
  require_nonempty(confidence.size());
  if (bins == 0) throw ValidationError("bin count must be >= 1");
  std::vector<double> conf_sum(bins, 0.0);
  std::vector<std::size_t> hits(bins, 0), counts(bins, 0);
  for (std::size_t i = 0; i < confidence.size(); ++i) {
    const std::size_t k = reliability_bin(confidence[i], bins);
    conf_sum[k] += confidence[i];
    hits[k] += correct[i] ? 1 : 0;
    ++counts[k];
  }
  CalibrationResult out;
  out.bins.resize(bins);
  double weighted = 0.0;
  for (std::size_t k = 0; k < bins; ++k) {
    ReliabilityBin& b = out.bins[k];
    b.lo = bin_edge(k, bins);
    b.hi = bin_edge(k + 1, bins);
    b.count = counts[k];
    if (b.count == 0) continue;
    const double n = static_cast<double>(b.count);
    b.mean_confidence = conf_sum[k] / n;
    b.accuracy = static_cast<double>(hits[k]) / n;
    weighted += n * std::abs(b.accuracy - b.mean_confidence);
  }
  out.ece = weighted / static_cast<double>(confidence.size());
  return out;
}

ClassificationReport evaluate_classification(const ClassificationSamples& s, std::size_t bins) {
  require_nonempty(s.size());
  ClassificationReport r;
  r.n_samples = s.size();
  r.n_skipped_ood = s.skipped_ood;

  std::size_t hits = 0;
  for (std::uint8_t c : s.correct) hits += c;
  r.accuracy = static_cast<double>(hits) / static_cast<double>(s.size());

  CalibrationResult cal = calibration_error(s.confidence, s.correct, bins);
  r.ece = cal.ece;
  r.bins = std::move(cal.bins);

  std::vector<double> nll_terms(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    double p = s.true_class_prob[i];
    if (p < kProbabilityFloor) {
      p = kProbabilityFloor;
      ++r.n_probability_clamped;
    }
    nll_terms[i] = -std::log(p);
  }
  r.nll = mean_of(nll_terms);
  r.brier = mean_of(s.brier_term);
  return r;
}

ClassificationReport evaluate_classification(std::span<const AggregatedPrediction> agg,
                                             const GroundTruthIndex& gt, std::size_t bins) {
  return evaluate_classification(join_classification(agg, gt), bins);
}

double accuracy(std::span<const AggregatedPrediction> agg, const GroundTruthIndex& gt) {
  const ClassificationSamples s = join_classification(agg, gt);
  require_nonempty(s.size());
  std::size_t hits = 0;
  for (std::uint8_t c : s.correct) hits += c;
  return static_cast<double>(hits) / static_cast<double>(s.size());
}

CalibrationResult ece_classification(std::span<const AggregatedPrediction> agg, const GroundTruthIndex& gt,
                                     std::size_t bins) {
  const ClassificationSamples s = join_classification(agg, gt);
  return calibration_error(s.confidence, s.correct, bins);
}

double nll_classification(std::span<const AggregatedPrediction> agg, const GroundTruthIndex& gt) {
  return evaluate_classification(agg, gt, 1).nll;
}

double brier(std::span<const AggregatedPrediction> agg, const GroundTruthIndex& gt) {
  const ClassificationSamples s = join_classification(agg, gt);
  require_nonempty(s.size());
  return mean_of(s.brier_term);
}

}  // namespace shiftbench

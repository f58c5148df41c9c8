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

#include "shiftbench/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "shiftbench/error.hpp"
#include "shiftbench/parallel.hpp"

namespace shiftbench {
namespace {

using Json = nlohmann::json;

constexpr std::array<std::string_view, 9> kDatasetOrder = {"ID",    "KITTI", "CC",    "CADC", "LFog",
                                                           "LRain", "HFog",  "HRain", "OoD"};
constexpr std::array<std::string_view, 9> kDatasetLabels = {"ID",      "KITTI",  "CC",      "Weather", "L. Fog",
                                                            "L. Rain", "H. Fog", "H. Rain", "OoD"};
constexpr std::array<std::string_view, 6> kMethodOrder = {"vanilla", "ensemble", "mc", "ll", "after_bb", "head"};
constexpr std::string_view kAbsent = "\xE2\x80\x94";  // U+2014

template <std::size_t N>
std::vector<std::string> canonical_order(std::vector<std::string> tags, const std::array<std::string_view, N>& known) {
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
  auto rank = [&](const std::string& t) {
    const auto it = std::find(known.begin(), known.end(), t);
    return static_cast<std::size_t>(it - known.begin());
  };
  std::stable_sort(tags.begin(), tags.end(), [&](const std::string& a, const std::string& b) { return rank(a) < rank(b); });
  return tags;
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_cell(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

std::string missing_list(const std::vector<std::string>& ids) {
  constexpr std::size_t kShown = 10;
  std::string msg;
  for (std::size_t i = 0; i < std::min(ids.size(), kShown); ++i) {
    if (i > 0) msg += ", ";
    msg += "'" + ids[i] + "'";
  }
  if (ids.size() > kShown) msg += " (+" + std::to_string(ids.size() - kShown) + " more)";
  return msg;
}

// Table rows: label, decimals, value accessor.
struct ClassRow {
  std::string_view label;
  int decimals;
  double (*value)(const ClassificationReport&);
};

struct RegRow {
  std::string_view label;
  int decimals;
  std::optional<double> (*value)(const RegressionReport&);
};

constexpr std::array<ClassRow, 4> kClassRows = {{
    {"Acc.", 3, [](const ClassificationReport& r) { return r.accuracy; }},
    {"ECE", 3, [](const ClassificationReport& r) { return r.ece; }},
    {"Brier S.", 3, [](const ClassificationReport& r) { return r.brier; }},
    {"NLL", 1, [](const ClassificationReport& r) { return r.nll; }},
}};
constexpr std::size_t kClassMarkdownRows = 3;

constexpr std::array<RegRow, 5> kRegRows = {{
    {"IoU", 3, [](const RegressionReport& r) { return std::optional<double>(r.mean_iou); }},
    {"ECE", 3, [](const RegressionReport& r) { return r.ece; }},
    {"NLL", 1, [](const RegressionReport& r) { return r.nll; }},
    {"MAE", 1, [](const RegressionReport& r) { return std::optional<double>(r.mae); }},
    {"Sharpness", 1, [](const RegressionReport& r) { return r.sharpness; }},
}};
constexpr std::size_t kRegMarkdownRows = 3;

// Known columns always shown, user tags appended.
std::vector<std::string> table_columns(const EvaluationRun& run, bool with_ood) {
  std::vector<std::string> cols;
  for (std::string_view t : kDatasetOrder) {
    if (t == "OoD" && !with_ood) continue;
    cols.emplace_back(t);
  }
  for (const std::string& d : run.datasets) {
    if (std::find(kDatasetOrder.begin(), kDatasetOrder.end(), d) == kDatasetOrder.end()) cols.push_back(d);
  }
  return cols;
}

std::string class_cell(const EvaluationRun& run, const std::string& method, const std::string& dataset,
                       const ClassRow& row) {
  const EvaluationCell* c = run.find(method, dataset);
  if (c == nullptr || !c->classification) return std::string(kAbsent);
  return fixed(row.value(*c->classification), row.decimals);
}

std::string reg_cell(const EvaluationRun& run, const std::string& method, const std::string& dataset,
                     const RegRow& row) {
  const EvaluationCell* c = run.find(method, dataset);
  if (c == nullptr || !c->regression) return std::string(kAbsent);
  const std::optional<double> v = row.value(*c->regression);
  return v ? fixed(*v, row.decimals) : std::string(kAbsent);
}

bool wants_classification(Task t) { return t != Task::Regression; }
bool wants_regression(Task t) { return t != Task::Classification; }

struct Table {
  std::string name;
  std::vector<std::string> columns;
  // metric label, method, rendered cells
  std::vector<std::tuple<std::string, std::string, std::vector<std::string>>> rows;
};

std::vector<Table> build_tables(const EvaluationRun& run, bool markdown) {
  std::vector<Table> tables;
  if (wants_classification(run.task)) {
    Table t{"classification", table_columns(run, false), {}};
    const std::size_t n = markdown ? kClassMarkdownRows : kClassRows.size();
    for (std::size_t r = 0; r < n; ++r) {
      for (const std::string& m : run.methods) {
        std::vector<std::string> cells;
        for (const std::string& d : t.columns) cells.push_back(class_cell(run, m, d, kClassRows[r]));
        t.rows.emplace_back(std::string(kClassRows[r].label), m, std::move(cells));
      }
    }
    tables.push_back(std::move(t));
  }
  if (wants_regression(run.task)) {
    Table t{"regression", table_columns(run, true), {}};
    const std::size_t n = markdown ? kRegMarkdownRows : kRegRows.size();
    for (std::size_t r = 0; r < n; ++r) {
      for (const std::string& m : run.methods) {
        std::vector<std::string> cells;
        for (const std::string& d : t.columns) cells.push_back(reg_cell(run, m, d, kRegRows[r]));
        t.rows.emplace_back(std::string(kRegRows[r].label), m, std::move(cells));
      }
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

std::string render_markdown(const EvaluationRun& run) {
  std::ostringstream out;
  bool first = true;
  for (const Table& t : build_tables(run, true)) {
    if (!first) out << '\n';
    first = false;
    out << "## " << (t.name == "classification" ? "Classification" : "Localization") << "\n\n";
    out << "| Metric | Method |";
    for (const std::string& c : t.columns) out << ' ' << md_cell(dataset_label(c)) << " |";
    out << "\n| --- | --- |";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << " ---: |";
    out << '\n';
    for (const auto& [metric, method, cells] : t.rows) {
      out << "| " << metric << " | " << md_cell(method) << " |";
      for (const std::string& c : cells) out << ' ' << c << " |";
      out << '\n';
    }
  }
  return out.str();
}

std::string render_csv(const EvaluationRun& run) {
  // Each table repeats its own header since the column sets differ.
  std::ostringstream out;
  for (const Table& t : build_tables(run, false)) {
    out << "table,metric,method";
    for (const std::string& c : t.columns) out << ',' << csv_field(c);
    out << '\n';
    for (const auto& [metric, method, cells] : t.rows) {
      out << t.name << ',' << csv_field(metric) << ',' << csv_field(method);
      for (const std::string& c : cells) out << ',' << csv_field(c);
      out << '\n';
    }
  }
  return out.str();
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ValidationError("unterminated quoted CSV field");
  fields.push_back(std::move(cur));
  return fields;
}

// JSON conversion.

Json bins_json(const std::vector<ReliabilityBin>& bins) {
  Json a = Json::array();
  for (const ReliabilityBin& b : bins) {
    a.push_back({{"lo", b.lo}, {"hi", b.hi}, {"mean_confidence", b.mean_confidence}, {"accuracy", b.accuracy},
                 {"count", b.count}});
  }
  return a;
}

Json levels_json(const std::vector<CalibrationLevel>& levels) {
  Json a = Json::array();
  for (const CalibrationLevel& l : levels) a.push_back({{"level", l.level}, {"empirical_frequency", l.empirical_frequency}});
  return a;
}

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json class_json(const ClassificationReport& r) {
  return {{"accuracy", r.accuracy},
          {"ece", r.ece},
          {"nll", r.nll},
          {"brier", r.brier},
          {"n_samples", r.n_samples},
          {"n_skipped_ood", r.n_skipped_ood},
          {"n_probability_clamped", r.n_probability_clamped},
          {"probability_floor", r.probability_floor},
          {"bins", bins_json(r.bins)}};
}

Json reg_json(const RegressionReport& r) {
  Json coords = Json::array();
  for (const auto& lv : r.coordinate_levels) coords.push_back(levels_json(lv));
  return {{"mae", r.mae},
          {"mean_iou", r.mean_iou},
          {"nll", opt_json(r.nll)},
          {"ece", opt_json(r.ece)},
          {"sharpness", opt_json(r.sharpness)},
          {"n_samples", r.n_samples},
          {"n_excluded_degenerate", r.n_excluded_degenerate},
          {"n_sigma_floored", r.n_sigma_floored},
          {"levels", levels_json(r.levels)},
          {"coordinate_levels", coords},
          {"coordinate_ece", r.coordinate_ece},
          {"uncertainty_absent_reason",
           r.uncertainty_absent_reason ? Json(*r.uncertainty_absent_reason) : Json(nullptr)}};
}

std::optional<double> opt_double(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

std::vector<ReliabilityBin> parse_bins(const Json& a) {
  std::vector<ReliabilityBin> out;
  for (const Json& b : a) {
    out.push_back({b.at("lo").get<double>(), b.at("hi").get<double>(), b.at("mean_confidence").get<double>(),
                   b.at("accuracy").get<double>(), b.at("count").get<std::size_t>()});
  }
  return out;
}

std::vector<CalibrationLevel> parse_levels(const Json& a) {
  std::vector<CalibrationLevel> out;
  for (const Json& l : a) out.push_back({l.at("level").get<double>(), l.at("empirical_frequency").get<double>()});
  return out;
}

ClassificationReport parse_class(const Json& j) {
  ClassificationReport r;
  r.accuracy = j.at("accuracy").get<double>();
  r.ece = j.at("ece").get<double>();
  r.nll = j.at("nll").get<double>();
  r.brier = j.at("brier").get<double>();
  r.n_samples = j.at("n_samples").get<std::size_t>();
  r.n_skipped_ood = j.at("n_skipped_ood").get<std::size_t>();
  r.n_probability_clamped = j.at("n_probability_clamped").get<std::size_t>();
  r.probability_floor = j.at("probability_floor").get<double>();
  r.bins = parse_bins(j.at("bins"));
  return r;
}

RegressionReport parse_reg(const Json& j) {
  RegressionReport r;
  r.mae = j.at("mae").get<double>();
  r.mean_iou = j.at("mean_iou").get<double>();
  r.nll = opt_double(j, "nll");
  r.ece = opt_double(j, "ece");
  r.sharpness = opt_double(j, "sharpness");
  r.n_samples = j.at("n_samples").get<std::size_t>();
  r.n_excluded_degenerate = j.at("n_excluded_degenerate").get<std::size_t>();
  r.n_sigma_floored = j.at("n_sigma_floored").get<std::size_t>();
  r.levels = parse_levels(j.at("levels"));
  const Json& coords = j.at("coordinate_levels");
  if (coords.size() != 4) throw ValidationError("coordinate_levels must hold 4 entries");
  for (std::size_t k = 0; k < 4; ++k) r.coordinate_levels[k] = parse_levels(coords[k]);
  r.coordinate_ece = j.at("coordinate_ece").get<std::array<double, 4>>();
  if (!j.at("uncertainty_absent_reason").is_null()) {
    r.uncertainty_absent_reason = j.at("uncertainty_absent_reason").get<std::string>();
  }
  return r;
}

std::optional<std::string> opt_string(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

bool selected(const EvaluationCell& c, std::string_view method, std::string_view dataset) {
  return (method.empty() || c.method == method) && (dataset.empty() || c.dataset == dataset);
}

}  // namespace

Task parse_task(std::string_view name) {
  if (name == "classification") return Task::Classification;
  if (name == "regression") return Task::Regression;
  if (name == "both") return Task::Both;
  throw ValidationError("unknown task '" + std::string(name) + "' (expected classification, regression or both)");
}

const char* to_string(Task t) noexcept {
  switch (t) {
    case Task::Classification: return "classification";
    case Task::Regression: return "regression";
    case Task::Both: return "both";
  }
  return "both";
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "markdown" || name == "md") return ReportFormat::Markdown;
  if (name == "csv") return ReportFormat::Csv;
  throw ValidationError("unknown report format '" + std::string(name) + "' (expected markdown or csv)");
}

void EvaluationConfig::validate() const {
  if (bins == 0) throw ValidationError("calibration bins must be >= 1");
  if (levels == 0) throw ValidationError("calibration levels must be >= 1");
}

const EvaluationCell* EvaluationRun::find(std::string_view method, std::string_view dataset) const {
  for (const EvaluationCell& c : cells) {
    if (c.method == method && c.dataset == dataset) return &c;
  }
  return nullptr;
}

std::vector<std::string> order_datasets(std::vector<std::string> tags) {
  return canonical_order(std::move(tags), kDatasetOrder);
}

std::vector<std::string> order_methods(std::vector<std::string> tags) {
  return canonical_order(std::move(tags), kMethodOrder);
}

std::string dataset_label(std::string_view tag) {
  const auto it = std::find(kDatasetOrder.begin(), kDatasetOrder.end(), tag);
  if (it == kDatasetOrder.end()) return std::string(tag);
  return std::string(kDatasetLabels[static_cast<std::size_t>(it - kDatasetOrder.begin())]);
}

EvaluationRun evaluate(std::span<const AggregatedPrediction> agg, std::span<const GroundTruthRecord> gt,
                       const EvaluationConfig& config) {
  config.validate();
  const GroundTruthIndex index(gt);

  std::vector<std::string> missing;
  std::set<std::string_view> missing_seen;
  std::set<std::pair<std::string_view, std::string_view>> keys;
  for (const AggregatedPrediction& a : agg) {
    if (index.find(a.image_id) == nullptr) {
      if (missing_seen.insert(a.image_id).second) missing.push_back(a.image_id);
      continue;
    }
    if (!keys.emplace(a.method, a.image_id).second) {
      throw ValidationError("duplicate prediction for image '" + a.image_id + "', method '" + a.method + "'");
    }
  }
  if (!missing.empty()) {
    throw ValidationError("predictions reference image_ids without ground truth: " + missing_list(missing));
  }

  EvaluationRun run;
  run.task = config.task;
  {
    std::vector<std::string> datasets, methods;
    for (const GroundTruthRecord& r : gt) datasets.push_back(r.dataset);
    for (const AggregatedPrediction& a : agg) methods.push_back(a.method);
    run.datasets = order_datasets(std::move(datasets));
    run.methods = order_methods(std::move(methods));
  }

  std::map<std::pair<std::string_view, std::string_view>, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < agg.size(); ++i) {
    members[{agg[i].method, index.at(agg[i].image_id).dataset}].push_back(i);
  }

  for (const std::string& m : run.methods) {
    for (const std::string& d : run.datasets) run.cells.push_back({m, d, {}, {}, {}, {}});
  }

  // OoD skips of cells with no scorable sample still count towards the run.
  std::vector<std::size_t> ood_only(run.cells.size(), 0);
  parallel_for(run.cells.size(), config.threads, [&](std::size_t ci) {
    EvaluationCell& cell = run.cells[ci];
    const auto it = members.find({cell.method, cell.dataset});
    if (it == members.end()) {
      const std::string reason = "no predictions for this method and dataset";
      if (wants_classification(config.task)) cell.classification_absent = reason;
      if (wants_regression(config.task)) cell.regression_absent = reason;
      return;
    }
    std::vector<AggregatedPrediction> with_probs, with_box;
    for (std::size_t i : it->second) {
      if (agg[i].mean_probs) with_probs.push_back(agg[i]);
      if (agg[i].mean_box) with_box.push_back(agg[i]);
    }

    if (wants_classification(config.task)) {
      if (with_probs.empty()) {
        cell.classification_absent = "method has no class predictions";
      } else {
        const ClassificationSamples s = join_classification(with_probs, index);
        if (s.size() == 0) {
          cell.classification_absent = "every sample is out-of-distribution";
          ood_only[ci] = s.skipped_ood;
        } else {
          cell.classification = evaluate_classification(s, config.bins);
        }
      }
    }
    if (wants_regression(config.task)) {
      if (with_box.empty()) {
        cell.regression_absent = "method has no box predictions";
      } else {
        const RegressionSamples s = join_regression(with_box, index);
        if (s.size() == 0) {
          cell.regression_absent = "every mean box is degenerate";
        } else {
          cell.regression = evaluate_regression(s, config.levels);
        }
      }
    }
  });

  run.metadata.seed = config.seed;
  run.metadata.version = SHIFTBENCH_VERSION;
  // Counted in pass records, so raw and pre-aggregated inputs agree.
  for (const AggregatedPrediction& a : agg) run.metadata.n_predictions += a.pass_count;
  for (std::size_t n : ood_only) run.metadata.n_skipped_ood += n;
  for (const EvaluationCell& c : run.cells) {
    if (c.classification) {
      run.metadata.n_skipped_ood += c.classification->n_skipped_ood;
      run.metadata.n_probability_clamped += c.classification->n_probability_clamped;
    }
    if (c.regression) {
      run.metadata.n_sigma_floored += c.regression->n_sigma_floored;
      run.metadata.n_excluded_degenerate += c.regression->n_excluded_degenerate;
    }
  }
  return run;
}

EvaluationRun evaluate_predictions(std::vector<PredictionRecord> predictions, std::span<const GroundTruthRecord> gt,
                                   const EvaluationConfig& config) {
  const std::vector<SampleSet> sets = group_samples(std::move(predictions));
  const std::vector<AggregatedPrediction> agg = aggregate_all(sets, config.threads);
  return evaluate(agg, gt, config);
}

std::string render_report(const EvaluationRun& run, ReportFormat format) {
  return format == ReportFormat::Markdown ? render_markdown(run) : render_csv(run);
}

ReportCsv parse_report_csv(std::string_view text) {
  ReportCsv out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::string> columns;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() < 3) throw ValidationError("report CSV row has fewer than 3 fields");
    if (f[0] == "table") {
      columns.assign(f.begin() + 3, f.end());
      for (const std::string& c : columns) {
        if (std::find(out.datasets.begin(), out.datasets.end(), c) == out.datasets.end()) out.datasets.push_back(c);
      }
      continue;
    }
    if (f.size() != columns.size() + 3) throw ValidationError("report CSV row width does not match its header");
    ReportCsvRow row{f[0], f[1], f[2], {}};
    // Cells are re-indexed against the union of dataset columns.
    row.cells.assign(out.datasets.size(), std::string(kAbsent));
    for (std::size_t k = 0; k < columns.size(); ++k) {
      const auto pos = std::find(out.datasets.begin(), out.datasets.end(), columns[k]) - out.datasets.begin();
      row.cells[static_cast<std::size_t>(pos)] = f[k + 3];
    }
    out.rows.push_back(std::move(row));
  }
  for (ReportCsvRow& r : out.rows) r.cells.resize(out.datasets.size(), std::string(kAbsent));
  return out;
}

std::string to_json(const EvaluationRun& run) {
  Json cells = Json::array();
  for (const EvaluationCell& c : run.cells) {
    cells.push_back({{"method", c.method},
                     {"dataset", c.dataset},
                     {"classification", c.classification ? class_json(*c.classification) : Json(nullptr)},
                     {"classification_absent", c.classification_absent ? Json(*c.classification_absent) : Json(nullptr)},
                     {"regression", c.regression ? reg_json(*c.regression) : Json(nullptr)},
                     {"regression_absent", c.regression_absent ? Json(*c.regression_absent) : Json(nullptr)}});
  }
  const RunMetadata& m = run.metadata;
  const Json j = {{"task", to_string(run.task)},
                  {"methods", run.methods},
                  {"datasets", run.datasets},
                  {"cells", cells},
                  {"metadata",
                   {{"seed", m.seed},
                    {"version", m.version},
                    {"n_predictions", m.n_predictions},
                    {"n_skipped_ood", m.n_skipped_ood},
                    {"n_probability_clamped", m.n_probability_clamped},
                    {"n_sigma_floored", m.n_sigma_floored},
                    {"n_excluded_degenerate", m.n_excluded_degenerate}}}};
  return j.dump(2) + "\n";
}

EvaluationRun parse_run(std::string_view text) {
  try {
    const Json j = Json::parse(text);
    EvaluationRun run;
    run.task = parse_task(j.at("task").get<std::string>());
    run.methods = j.at("methods").get<std::vector<std::string>>();
    run.datasets = j.at("datasets").get<std::vector<std::string>>();
    for (const Json& c : j.at("cells")) {
      EvaluationCell cell;
      cell.method = c.at("method").get<std::string>();
      cell.dataset = c.at("dataset").get<std::string>();
      if (!c.at("classification").is_null()) cell.classification = parse_class(c.at("classification"));
      cell.classification_absent = opt_string(c, "classification_absent");
      if (!c.at("regression").is_null()) cell.regression = parse_reg(c.at("regression"));
      cell.regression_absent = opt_string(c, "regression_absent");
      run.cells.push_back(std::move(cell));
    }
    const Json& m = j.at("metadata");
    run.metadata.seed = m.at("seed").get<std::uint64_t>();
    run.metadata.version = m.at("version").get<std::string>();
    run.metadata.n_predictions = m.at("n_predictions").get<std::size_t>();
    run.metadata.n_skipped_ood = m.at("n_skipped_ood").get<std::size_t>();
    run.metadata.n_probability_clamped = m.at("n_probability_clamped").get<std::size_t>();
    run.metadata.n_sigma_floored = m.at("n_sigma_floored").get<std::size_t>();
    run.metadata.n_excluded_degenerate = m.at("n_excluded_degenerate").get<std::size_t>();
    return run;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed evaluation run: ") + e.what());
  }
}

std::string reliability_csv(const EvaluationRun& run, std::string_view method, std::string_view dataset) {
  std::ostringstream out;
  out << "method,dataset,bin_lo,bin_hi,mean_confidence,accuracy,count\n";
  for (const EvaluationCell& c : run.cells) {
    if (!c.classification || !selected(c, method, dataset)) continue;
    for (const ReliabilityBin& b : c.classification->bins) {
      out << csv_field(c.method) << ',' << csv_field(c.dataset) << ',' << shortest(b.lo) << ',' << shortest(b.hi)
          << ',' << shortest(b.mean_confidence) << ',' << shortest(b.accuracy) << ',' << b.count << '\n';
    }
  }
  return out.str();
}

std::string calibration_csv(const EvaluationRun& run, std::string_view method, std::string_view dataset) {
  static constexpr std::array<std::string_view, 4> kCoords = {"x1", "y1", "x2", "y2"};
  std::ostringstream out;
  out << "method,dataset,coordinate,level,empirical_frequency\n";
  for (const EvaluationCell& c : run.cells) {
    if (!c.regression || !selected(c, method, dataset)) continue;
    auto emit = [&](std::string_view coord, const std::vector<CalibrationLevel>& levels) {
      for (const CalibrationLevel& l : levels) {
        out << csv_field(c.method) << ',' << csv_field(c.dataset) << ',' << coord << ',' << shortest(l.level) << ','
            << shortest(l.empirical_frequency) << '\n';
      }
    };
    emit("all", c.regression->levels);
    for (std::size_t k = 0; k < 4; ++k) emit(kCoords[k], c.regression->coordinate_levels[k]);
  }
  return out.str();
}

}  // namespace shiftbench

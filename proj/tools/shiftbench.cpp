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

// shiftbench command-line front end.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shiftbench/aggregation.hpp"
#include "shiftbench/curation.hpp"
#include "shiftbench/error.hpp"
#include "shiftbench/image.hpp"
#include "shiftbench/kernels.hpp"
#include "shiftbench/parallel.hpp"
#include "shiftbench/records.hpp"
#include "shiftbench/report.hpp"
#include "shiftbench/weather.hpp"

namespace fs = std::filesystem;
using namespace shiftbench;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return ss.str();
}

void write_file(const fs::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void emit(const std::string& out_path, std::string_view data) {
  if (out_path.empty() || out_path == "-") {
    std::cout << data;
    std::cout.flush();
  } else {
    write_file(out_path, data);
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

// First non-blank line decides between raw passes and aggregated records.
bool looks_aggregated(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, nl - pos);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        const auto j = nlohmann::json::parse(line);
        return j.is_object() && !j.contains("pass_id") && j.contains("pass_count");
      } catch (const nlohmann::json::exception&) {
        return false;
      }
    }
    pos = nl + 1;
  }
  return false;
}

Split parse_split(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "val" || s == "validation") return Split::Validation;
  if (s == "test") return Split::Test;
  throw ValidationError("unknown split '" + s + "' (expected train, val or test)");
}

std::pair<int, long long> parse_pair(const std::string& item, const char* what) {
  const auto colon = item.find(':');
  if (colon == std::string::npos) throw ValidationError(std::string(what) + " entry '" + item + "' must be a:b");
  try {
    return {std::stoi(item.substr(0, colon)), std::stoll(item.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ValidationError(std::string(what) + " entry '" + item + "' is not numeric");
  }
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// key=value lines become --key=value arguments ahead of the real ones, so
// flags on the command line win. "sub.key" scopes a key to one subcommand.
std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
  std::string config_path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (config_path.empty()) return args;

  std::size_t sub_pos = 0;
  const CLI::App* sub = nullptr;
  for (std::size_t i = 1; i < args.size() && sub == nullptr; ++i) {
    for (const CLI::App* s : app.get_subcommands({})) {
      if (s->get_name() == args[i]) {
        sub = s;
        sub_pos = i;
        break;
      }
    }
  }

  std::vector<std::string> global_args, sub_args;
  std::istringstream in(read_file(config_path));
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(number, "config line must be key=value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::string scope;
    if (const auto dot = key.find('.'); dot != std::string::npos) {
      scope = key.substr(0, dot);
      key = key.substr(dot + 1);
    }
    const std::string flag = "--" + key;
    bool known = false;
    if (scope.empty() && app.get_option_no_throw(flag) != nullptr) {
      global_args.push_back(flag + "=" + value);
      known = true;
    }
    for (const CLI::App* s : app.get_subcommands({})) {
      if (!scope.empty() && s->get_name() != scope) continue;
      if (s->get_option_no_throw(flag) == nullptr) continue;
      known = true;
      if (s == sub) sub_args.push_back(flag + "=" + value);
    }
    if (!known) throw ParseError(number, "unknown config key '" + key + "'");
  }

  std::vector<std::string> out{args[0]};
  out.insert(out.end(), global_args.begin(), global_args.end());
  if (sub == nullptr) {
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
  }
  out.insert(out.end(), args.begin() + 1, args.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1);
  out.insert(out.end(), sub_args.begin(), sub_args.end());
  out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1, args.end());
  return out;
}

struct EvaluateOpts {
  std::string predictions, truth, task = "both", out;
  std::size_t threads = 1, bins = kDefaultCalibrationBins, levels = kDefaultCalibrationLevels;
  std::uint64_t seed = 0;
};

int run_evaluate(const EvaluateOpts& o) {
  EvaluationConfig cfg;
  cfg.task = parse_task(o.task);
  cfg.threads = o.threads;
  cfg.bins = o.bins;
  cfg.levels = o.levels;
  cfg.seed = o.seed;
  const std::string pred_text = read_file(o.predictions);
  const std::string truth_text = read_file(o.truth);
  const std::vector<GroundTruthRecord> gt = parse_ground_truth(truth_text, cfg.threads);
  EvaluationRun run;
  if (looks_aggregated(pred_text)) {
    run = evaluate(parse_aggregated(pred_text, cfg.threads), gt, cfg);
  } else {
    run = evaluate_predictions(parse_predictions(pred_text, cfg.threads), gt, cfg);
  }
  emit(o.out, to_json(run));
  return 0;
}

struct AggregateOpts {
  std::string predictions, out;
  std::size_t threads = 1;
};

int run_aggregate(const AggregateOpts& o) {
  const std::vector<SampleSet> sets = group_samples(parse_predictions(read_file(o.predictions), o.threads));
  const std::vector<AggregatedPrediction> agg = aggregate_all(sets, o.threads);
  std::string text;
  for (const AggregatedPrediction& a : agg) text += to_json_line(a) + "\n";
  emit(o.out, text);
  return 0;
}

struct ReportOpts {
  std::string run, format = "markdown", out, method, dataset;
};

int run_report(const ReportOpts& o) {
  emit(o.out, render_report(parse_run(read_file(o.run)), parse_report_format(o.format)));
  return 0;
}

int run_reliability(const ReportOpts& o) {
  emit(o.out, reliability_csv(parse_run(read_file(o.run)), o.method, o.dataset));
  return 0;
}

int run_calibration(const ReportOpts& o) {
  emit(o.out, calibration_csv(parse_run(read_file(o.run)), o.method, o.dataset));
  return 0;
}

struct CurateOpts {
  std::string scenes, out, split = "train", images, crops;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  double min_width = 30.0, max_expansion = 3.0, overlap_max = 1.0 / 3.0;
  bool keep_occluded = false;
  std::vector<std::string> remap, caps;
};

int run_curate(const CurateOpts& o) {
  CurationConfig cfg;
  cfg.rng_seed = o.seed;
  cfg.split = parse_split(o.split);
  cfg.min_object_width = o.min_width;
  cfg.max_expansion = o.max_expansion;
  cfg.overlap_ratio_max = o.overlap_max;
  cfg.drop_occluded_truncated = !o.keep_occluded;
  for (const std::string& r : o.remap) {
    const auto [from, to] = parse_pair(r, "remap");
    cfg.class_remap[from] = static_cast<int>(to);
  }
  for (const std::string& c : o.caps) {
    const auto [cls, n] = parse_pair(c, "cap");
    if (n < 0) throw ValidationError("cap for class " + std::to_string(cls) + " must be >= 0");
    cfg.class_caps[cls] = static_cast<std::size_t>(n);
  }
  cfg.validate();
  if (o.crops.empty() != o.images.empty()) throw ValidationError("--images and --crops must be given together");

  const std::vector<SceneAnnotation> scenes = parse_scenes(read_file(o.scenes), o.threads);
  const std::vector<SceneCuration> curated = curate_scenes(scenes, cfg, o.threads);
  std::vector<CropSpec> all;
  for (const SceneCuration& s : curated) all.insert(all.end(), s.specs.begin(), s.specs.end());
  const std::vector<CropSpec> kept = apply_class_caps(all, cfg);

  std::string text;
  for (const CropSpec& s : kept) text += to_json_line(s) + "\n";
  emit(o.out, text);

  if (!o.crops.empty()) {
    ensure_dir(o.crops);
    std::map<std::string_view, const SceneAnnotation*> by_id;
    for (const SceneAnnotation& s : scenes) by_id[s.image_id] = &s;
    const int size = static_cast<int>(cfg.target_size);
    parallel_for(kept.size(), o.threads, [&](std::size_t i) {
      const CropSpec& spec = kept[i];
      const RgbImage src = read_png(fs::path(o.images) / (spec.image_id + ".png"));
      const SceneAnnotation& scene = *by_id.at(spec.image_id);
      if (src.width != static_cast<int>(scene.width) || src.height != static_cast<int>(scene.height)) {
        throw ValidationError("image '" + spec.image_id + "' is " + std::to_string(src.width) + "x" +
                              std::to_string(src.height) + " but its annotation says " +
                              std::to_string(static_cast<int>(scene.width)) + "x" +
                              std::to_string(static_cast<int>(scene.height)));
      }
      write_png(fs::path(o.crops) / (spec.image_id + "_" + std::to_string(spec.main_object_index) + ".png"),
                resample_window(src, spec.window, size));
    });
  }
  return 0;
}

struct AugmentOpts {
  std::string effect, in, out;
  int level = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

int run_augment(const AugmentOpts& o) {
  const AugmentationPreset preset = weather_preset(parse_effect(o.effect), o.level);
  preset.validate();
  std::error_code ec;
  if (!fs::is_directory(o.in, ec)) throw IoError("input directory '" + o.in + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(o.in, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") files.push_back(entry.path());
  }
  if (ec) throw IoError("cannot list '" + o.in + "': " + ec.message());
  std::sort(files.begin(), files.end());
  ensure_dir(o.out);
  parallel_for(files.size(), o.threads, [&](std::size_t i) {
    const RgbImage img = read_png(files[i]);
    Rng rng = image_rng(o.seed, files[i].stem().string());
    write_png(fs::path(o.out) / files[i].filename(), apply_weather(img, preset, rng));
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty evaluation under distribution shift", "shiftbench"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", SHIFTBENCH_VERSION);
  std::string kernels = "auto";
  std::string config_unused;
  app.add_option("--kernels", kernels, "Kernel variant: auto, scalar, avx2 or neon");
  app.add_option("--config", config_unused, "key=value file; command-line flags override it");

  EvaluateOpts ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against ground truth");
  evaluate_cmd->add_option("--predictions", ev.predictions, "Prediction JSONL (raw passes or aggregated)")->required();
  evaluate_cmd->add_option("--truth", ev.truth, "Ground-truth JSONL")->required();
  evaluate_cmd->add_option("--task", ev.task, "classification, regression or both");
  evaluate_cmd->add_option("--out", ev.out, "Run JSON output (default stdout)");
  evaluate_cmd->add_option("--threads", ev.threads, "Worker threads, 0 for all cores");
  evaluate_cmd->add_option("--bins", ev.bins, "Reliability bins");
  evaluate_cmd->add_option("--levels", ev.levels, "Regression calibration levels");
  evaluate_cmd->add_option("--seed", ev.seed, "Seed recorded in the run metadata");

  AggregateOpts ag;
  auto* aggregate_cmd = app.add_subcommand("aggregate", "Average stochastic passes per image and method");
  aggregate_cmd->add_option("--predictions", ag.predictions, "Prediction JSONL")->required();
  aggregate_cmd->add_option("--out", ag.out, "Aggregated JSONL output (default stdout)");
  aggregate_cmd->add_option("--threads", ag.threads, "Worker threads, 0 for all cores");

  ReportOpts rep;
  auto* report_cmd = app.add_subcommand("report", "Render metric tables from a run");
  report_cmd->add_option("--run", rep.run, "Run JSON from evaluate")->required();
  report_cmd->add_option("--format", rep.format, "markdown or csv");
  report_cmd->add_option("--out", rep.out, "Output file (default stdout)");

  ReportOpts rel;
  auto* reliability_cmd = app.add_subcommand("reliability", "Export reliability bins as CSV");
  reliability_cmd->add_option("--run", rel.run, "Run JSON from evaluate")->required();
  reliability_cmd->add_option("--out", rel.out, "CSV output (default stdout)");
  reliability_cmd->add_option("--method", rel.method, "Only this method");
  reliability_cmd->add_option("--dataset", rel.dataset, "Only this dataset");

  ReportOpts cal;
  auto* calibration_cmd = app.add_subcommand("calibration", "Export regression calibration levels as CSV");
  calibration_cmd->add_option("--run", cal.run, "Run JSON from evaluate")->required();
  calibration_cmd->add_option("--out", cal.out, "CSV output (default stdout)");
  calibration_cmd->add_option("--method", cal.method, "Only this method");
  calibration_cmd->add_option("--dataset", cal.dataset, "Only this dataset");

  CurateOpts cu;
  auto* curate_cmd = app.add_subcommand("curate", "Cut square single-object crops from annotated scenes");
  curate_cmd->add_option("--scenes", cu.scenes, "Scene JSONL")->required();
  curate_cmd->add_option("--out", cu.out, "CropSpec JSONL output (default stdout)");
  curate_cmd->add_option("--seed", cu.seed, "RNG seed");
  curate_cmd->add_option("--split", cu.split, "train, val or test (selects default class caps)");
  curate_cmd->add_option("--threads", cu.threads, "Worker threads, 0 for all cores");
  curate_cmd->add_option("--min-width", cu.min_width, "Minimum object width in pixels");
  curate_cmd->add_option("--max-expansion", cu.max_expansion, "Largest window side as a multiple of the tight side");
  curate_cmd->add_option("--overlap-max", cu.overlap_max, "Largest allowed overlap ratio of another object");
  curate_cmd->add_flag("--keep-occluded", cu.keep_occluded, "Keep occluded and truncated objects of every class");
  curate_cmd->add_option("--remap", cu.remap, "Class remap entries from:to (negative to drops)")->delimiter(',');
  curate_cmd->add_option("--cap", cu.caps, "Per-class cap entries class:n")->delimiter(',');
  curate_cmd->add_option("--images", cu.images, "Directory of <image_id>.png source images");
  curate_cmd->add_option("--crops", cu.crops, "Directory for cropped PNGs");
  curate_cmd->get_option("--remap")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  curate_cmd->get_option("--cap")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

  AugmentOpts au;
  auto* augment_cmd = app.add_subcommand("augment", "Apply synthetic rain or fog to 256x256 PNG crops");
  augment_cmd->add_option("--effect", au.effect, "rain or fog")->required();
  augment_cmd->add_option("--level", au.level, "1 (light) or 2 (heavy)");
  augment_cmd->add_option("--seed", au.seed, "RNG seed");
  augment_cmd->add_option("--in", au.in, "Input directory")->required();
  augment_cmd->add_option("--out", au.out, "Output directory")->required();
  augment_cmd->add_option("--threads", au.threads, "Worker threads, 0 for all cores");

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_config(app, std::move(args));
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const IoError& e) {
    std::cerr << "shiftbench: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "shiftbench: " << e.what() << '\n';
    return 1;
  }

  try {
    if (kernels != "auto" && !kernels::select_kernels(kernels)) {
      throw ValidationError("kernel variant '" + kernels + "' is not available on this machine");
    }
    if (*evaluate_cmd) return run_evaluate(ev);
    if (*aggregate_cmd) return run_aggregate(ag);
    if (*report_cmd) return run_report(rep);
    if (*reliability_cmd) return run_reliability(rel);
    if (*calibration_cmd) return run_calibration(cal);
    if (*curate_cmd) return run_curate(cu);
    if (*augment_cmd) return run_augment(au);
  } catch (const IoError& e) {
    std::cerr << "shiftbench: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "shiftbench: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "shiftbench: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

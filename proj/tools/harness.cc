// Copyright 2026 The pedbench Authors
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

#include "harness.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pedbench/dataset_builder.h"
#include "pedbench/error.h"
#include "pedbench/parallel.h"
#include "pedbench/record_io.h"
#include "pedbench/synth_sim.h"

namespace pedbench::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& message) {
  throw Error(ErrorCode::kInvalidArgument, message);
}

json config_json(const RunConfig& config) {
  json out = json::object();
  for (const ConfigEntry& e : config_entries(config)) out[e.section][e.key] = e.value;
  return out;
}

// Files are written into a hidden staging directory and moved into place only
// after the whole subcommand succeeded.
class Staging {
 public:
  Staging(const fs::path& out_dir, const std::string& name) : out_dir_(out_dir) {
    fs::create_directories(out_dir_);
    dir_ = out_dir_ / (".staging-" + name);
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Staging() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  Staging(const Staging&) = delete;
  Staging& operator=(const Staging&) = delete;

  fs::path file(const std::string& name) {
    names_.push_back(name);
    return dir_ / name;
  }
  void commit() {
    for (const std::string& name : names_) fs::rename(dir_ / name, out_dir_ / name);
  }

 private:
  fs::path out_dir_;
  fs::path dir_;
  std::vector<std::string> names_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

void write_json(const fs::path& path, const json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, path.string() + ": " + e.what());
  }
}

const std::string& single_input(const RunConfig& config) {
  if (config.inputs.size() != 1) bad("exactly one --input is required");
  return config.inputs.front();
}

json table_json(const ReportTable& table) {
  json rows = json::array();
  for (const MetricRow& row : table.rows) {
    rows.push_back({{"metric", to_string(row.metric)},
                    {"predictor", row.predictor},
                    {"values", row.values}});
  }
  return {{"variant", table.variant},
          {"n_instances", table.n_instances},
          {"horizons_s", table.horizons_s},
          {"rows", rows}};
}

ReportTable table_from_json(const json& doc) {
  try {
    ReportTable table;
    table.variant = doc.at("variant").get<std::string>();
    table.n_instances = doc.at("n_instances").get<std::size_t>();
    table.horizons_s = doc.at("horizons_s").get<std::vector<double>>();
    for (const json& row : doc.at("rows")) {
      table.rows.push_back({parse_metric(row.at("metric").get<std::string>()),
                            row.at("predictor").get<std::string>(),
                            row.at("values").get<std::vector<double>>()});
    }
    return table;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, std::string("report: ") + e.what());
  }
}

std::vector<PredictionInstance> load_variant(const RunConfig& config) {
  std::vector<PredictionInstance> instances = read_instances(single_input(config));
  BuiltDataset selected = select_by_split(std::move(instances), config.motion_threshold_m,
                                          config.selection_seed);
  return config.variant == "motion-changes" ? std::move(selected.motion_changes)
                                            : std::move(selected.full);
}

int cmd_build_dataset(const RunConfig& config, std::ostream& out) {
  const std::vector<RawTrackRecord> records = read_raw_tracks(single_input(config));
  const BuiltDataset built = build_dataset(records, config.build_config());
  Staging staging(config.out_dir, "build-dataset");
  write_instances(staging.file("full.jsonl"), built.full);
  write_instances(staging.file("motion_changes.jsonl"), built.motion_changes);
  write_text(staging.file("config.ini"), to_ini(config));
  const auto flagged = std::count_if(built.full.begin(), built.full.end(),
                                     [](const auto& x) { return x.motion_change; });
  json summary = {{"config", config_json(config)},
                  {"n_tracks", records.size()},
                  {"n_full", built.full.size()},
                  {"n_flagged", flagged},
                  {"n_motion_changes", built.motion_changes.size()},
                  {"warnings", built.warnings}};
  write_json(staging.file("build.json"), summary);
  staging.commit();
  out << "built " << built.full.size() << " instances (" << flagged << " flagged, "
      << built.motion_changes.size() << " in motion-changes) from " << records.size()
      << " tracks\n";
  return 0;
}

int cmd_synth_gen(const RunConfig& config, std::ostream& out) {
  const Corpus corpus = generate_corpus(config.synth, config.build_config());
  Staging staging(config.out_dir, "synth-gen");
  write_instances(staging.file("instances.jsonl"), corpus.instances);
  write_instances(staging.file("motion_changes.jsonl"), corpus.motion_changes);
  write_raw_tracks(staging.file("raw_tracks.jsonl"), corpus.raw);
  write_scenarios(staging.file("scenarios.json"), config.synth, corpus.scenarios);
  write_text(staging.file("config.ini"), to_ini(config));
  staging.commit();
  out << "generated " << corpus.scenarios.size() << " scenarios, "
      << corpus.instances.size() << " instances\n";
  return 0;
}

int cmd_evaluate(const RunConfig& config, std::ostream& out) {
  const std::vector<PredictionInstance> variant = load_variant(config);
  const std::vector<PredictionInstance> eval_set = filter_split(variant, config.eval_split);
  if (eval_set.empty()) {
    throw Error(ErrorCode::kTooFewInstances, "no instances in the evaluation split");
  }

  std::vector<MultimodalPrediction> predictions;
  std::string name;
  bool unimodal = false;
  json calibration_doc = nullptr;
  json ensemble_doc = nullptr;
  if (!config.predictions.empty()) {
    std::set<std::string> wanted;
    for (const PredictionInstance& x : eval_set) wanted.insert(x.instance_id);
    std::vector<MultimodalPrediction> external;
    for (MultimodalPrediction& p : read_predictions(config.predictions)) {
      if (wanted.count(p.instance_id)) external.push_back(std::move(p));
    }
    predictions = validate_predictions(eval_set, std::move(external));
    name = fs::path(config.predictions).stem().string();
    unimodal = std::all_of(predictions.begin(), predictions.end(),
                           [](const auto& p) { return p.modes.size() == 1; });
  } else {
    const std::vector<PredictionInstance> calibration_set =
        filter_split(variant, config.calibration_split);
    PredictorRun result = run_builtin_predictor(eval_set, calibration_set, config);
    predictions = std::move(result.predictions);
    name = std::string(result.predictor.name());
    unimodal = result.predictor.unimodal();
    if (result.calibration) {
      json schedules = json::object();
      json counts = json::object();
      for (int k = 0; k < kNumModeKinds; ++k) {
        const auto kind = static_cast<ModeKind>(k);
        schedules[std::string(to_string(kind))] = result.calibration->schedules[kind];
        counts[std::string(to_string(kind))] = result.calibration->closest_counts[k];
      }
      calibration_doc = {{"split", config.calibration_split},
                         {"n_instances", result.n_calibration},
                         {"closest_counts", counts},
                         {"variances_m2", schedules}};
    }
    if (result.predictor.kind() == PredictorKind::kEnsemble) {
      const EnsembleConfig& e = result.predictor.config().ensemble;
      ensemble_doc = {{"slow_weights", e.slow_weights}, {"moving_weights", e.moving_weights}};
    }
  }

  const ReportTable table = evaluate(eval_set, predictions, name, unimodal, config.metrics,
                                     config.task.rate_hz, config.variant);
  Staging staging(config.out_dir, "evaluate");
  json report = {{"config", config_json(config)},
                 {"predictor", name},
                 {"eval_split", config.eval_split},
                 {"table", table_json(table)},
                 {"ensemble_weights", ensemble_doc},
                 {"calibration", calibration_doc}};
  write_json(staging.file("report.json"), report);
  const std::vector<ReportTable> tables{table};
  write_text(staging.file("report.txt"), render_table(tables));
  if (config.predictions.empty()) {
    write_predictions(staging.file("predictions.jsonl"), predictions);
  }
  write_text(staging.file("config.ini"), to_ini(config));
  staging.commit();
  out << render_table(tables);
  return 0;
}

json onset_json(const std::optional<TimestampUs>& t) {
  return t ? json(*t) : json(nullptr);
}

int cmd_leakage_audit(const RunConfig& config, std::ostream& out) {
  const std::vector<RawTrackRecord> records = read_raw_tracks(single_input(config));
  std::vector<std::optional<LeakageEntry>> slots(records.size());
  parallel_for(records.size(), [&](std::size_t i) {
    const RawTrack& raw = records[i].track;
    if (raw.samples.size() < 2) return;
    // Smoothing is part of the processing under audit; onsets are measured
    // against the unsmoothed source.
    const ResampledTrack resampled = resample_track(
        config.smoothing_window > 0 ? apply_smoothing_artifact(raw, config.smoothing_window) : raw,
        config.task.rate_hz, config.resample);
    slots[i] = audit_leakage(raw, resampled, config.onset);
  });
  std::vector<LeakageEntry> entries;
  std::size_t skipped = 0;
  for (auto& slot : slots) {
    if (slot) {
      entries.push_back(std::move(*slot));
    } else {
      ++skipped;
    }
  }
  const LeakageReport report = summarize_leakage(std::move(entries));

  json list = json::array();
  for (const LeakageEntry& e : report.entries) {
    list.push_back({{"agent_id", e.agent_id},
                    {"camera_view", e.camera_view},
                    {"raw_onset_us", onset_json(e.raw_onset)},
                    {"resampled_onset_us", onset_json(e.resampled_onset)},
                    {"lead_s", e.lead_s ? json(*e.lead_s) : json(nullptr)},
                    {"status", e.lead_s ? "ok" : "NoOnsetDetected"}});
  }
  json doc = {{"config", config_json(config)},
              {"resample", to_string(config.resample)},
              {"n_tracks", records.size()},
              {"n_skipped", skipped},
              {"n_with_lead", report.n_with_lead},
              {"n_positive_lead", report.n_positive},
              {"mean_positive_lead_s", report.mean_positive_lead_s},
              {"max_lead_s", report.max_lead_s},
              {"entries", list}};
  Staging staging(config.out_dir, "leakage-audit");
  write_json(staging.file("leakage.json"), doc);
  write_text(staging.file("config.ini"), to_ini(config));
  staging.commit();
  out << "audited " << report.entries.size() << " tracks: " << report.n_positive
      << " with positive lead, max " << report.max_lead_s << " s\n";
  return 0;
}

int cmd_report(const RunConfig& config, std::ostream& out) {
  if (config.inputs.empty()) bad("report needs at least one --input report.json");
  // Tables keyed by variant, in first-seen order.
  std::vector<ReportTable> tables;
  json sources = json::array();
  for (const std::string& path : config.inputs) {
    const json doc = read_json(path);
    if (!doc.contains("table")) {
      throw Error(ErrorCode::kMalformedRecord, path + ": not an evaluate report");
    }
    const ReportTable table = table_from_json(doc.at("table"));
    sources.push_back({{"path", path}, {"config", doc.value("config", json::object())}});
    auto it = std::find_if(tables.begin(), tables.end(),
                           [&](const ReportTable& t) { return t.variant == table.variant; });
    if (it == tables.end()) {
      tables.push_back(table);
      continue;
    }
    if (it->horizons_s != table.horizons_s) bad(path + ": horizons differ from earlier reports");
    if (it->n_instances != table.n_instances) {
      bad(path + ": instance count differs from earlier " + table.variant + " reports");
    }
    it->rows.insert(it->rows.end(), table.rows.begin(), table.rows.end());
  }
  for (ReportTable& table : tables) {
    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const MetricRow& a, const MetricRow& b) { return a.metric < b.metric; });
  }
  json doc = {{"config", config_json(config)}, {"sources", sources}};
  json list = json::array();
  for (const ReportTable& t : tables) list.push_back(table_json(t));
  doc["tables"] = list;
  Staging staging(config.out_dir, "report");
  write_json(staging.file("table.json"), doc);
  write_text(staging.file("table.txt"), render_table(tables));
  write_text(staging.file("config.ini"), to_ini(config));
  staging.commit();
  out << render_table(tables);
  return 0;
}

}  // namespace

std::vector<PredictionInstance> filter_split(std::span<const PredictionInstance> instances,
                                             const std::string& choice) {
  std::string resolved = choice;
  if (choice == "auto") {
    const bool has_test = std::any_of(instances.begin(), instances.end(),
                                      [](const auto& x) { return x.split == Split::kTest; });
    resolved = has_test ? "test" : "all";
  }
  if (resolved == "all") return {instances.begin(), instances.end()};
  const Split split = parse_split(resolved);
  std::vector<PredictionInstance> out;
  for (const PredictionInstance& x : instances) {
    if (x.split == split) out.push_back(x);
  }
  return out;
}

PredictorRun run_builtin_predictor(std::span<const PredictionInstance> eval_set,
                                   std::span<const PredictionInstance> calibration_set,
                                   const RunConfig& config) {
  const PredictorKind kind = parse_predictor_kind(config.predictor);
  const double dt = 1.0 / config.task.rate_hz;
  PredictorRun result{KinematicPredictor(kind, config.predictor_config,
                                         default_schedules(config.task.future_steps(), dt)),
                      {},
                      std::nullopt,
                      calibration_set.size()};
  if (kind == PredictorKind::kEnsemble) {
    const bool calibrate =
        config.predictor_config.ensemble.covariance == CovarianceSource::kCalibrated;
    if (calibrate) {
      result.calibration = calibrate_covariance(calibration_set, result.predictor);
      result.predictor = result.predictor.with_schedules(result.calibration->schedules);
    }
    if (config.predictor_config.ensemble.tune_weights) {
      std::vector<int> steps;
      for (const double h : config.metrics.horizons.horizons_s) {
        steps.push_back(horizon_step(h, config.task.rate_hz,
                                     static_cast<std::size_t>(config.task.future_steps())));
      }
      PredictorConfig tuned = result.predictor.config();
      tuned.ensemble = tune_ensemble_weights(calibration_set, result.predictor, steps);
      result.predictor = result.predictor.with_config(tuned);
      if (calibrate) {
        result.calibration = calibrate_covariance(calibration_set, result.predictor);
        result.predictor = result.predictor.with_schedules(result.calibration->schedules);
      }
    }
  }
  result.predictions.resize(eval_set.size());
  parallel_for(eval_set.size(), [&](std::size_t i) {
    result.predictions[i] = result.predictor.predict(eval_set[i]);
  });
  return result;
}

std::string render_table(std::span<const ReportTable> tables) {
  std::ostringstream out;
  char buf[64];
  for (std::size_t t = 0; t < tables.size(); ++t) {
    const ReportTable& table = tables[t];
    if (t > 0) out << '\n';
    out << "variant: " << table.variant << "  instances: " << table.n_instances << '\n';
    std::snprintf(buf, sizeof(buf), "%-9s %-12s", "metric", "predictor");
    out << buf;
    for (const double h : table.horizons_s) {
      std::snprintf(buf, sizeof(buf), " %9s", (format_double(h) + " s").c_str());
      out << buf;
    }
    out << '\n';
    for (const MetricRow& row : table.rows) {
      std::snprintf(buf, sizeof(buf), "%-9s %-12s", std::string(to_string(row.metric)).c_str(),
                    row.predictor.c_str());
      out << buf;
      for (const double v : row.values) {
        std::snprintf(buf, sizeof(buf), " %9.4f", v);
        out << buf;
      }
      out << '\n';
    }
  }
  return out.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pedestrian trajectory prediction benchmark harness", "pedbench"};
  app.require_subcommand(1, 1);

  std::string config_path, predictor, predictions, variant, resample, out_dir, horizons;
  std::vector<std::string> inputs;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::optional<int> smoothing;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "INI config file");
    sub->add_option("--input", inputs, "Input file (repeatable)");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--seed", seed, "Seed for splits, selection and synthesis");
  };
  auto* build = app.add_subcommand("build-dataset", "Raw tracks to instance files");
  auto* synth = app.add_subcommand("synth-gen", "Synthetic corpus");
  auto* eval = app.add_subcommand("evaluate", "Score a predictor on an instances file");
  auto* leak = app.add_subcommand("leakage-audit", "Onset lead of resampled tracks");
  auto* report = app.add_subcommand("report", "Merge evaluate reports into one table");
  for (CLI::App* sub : {build, synth, eval, leak, report}) add_common(sub);
  for (CLI::App* sub : {build, leak}) {
    sub->add_option("--resample", resample, "anti-causal | causal");
  }
  eval->add_option("--variant", variant, "full | motion-changes");
  eval->add_option("--horizons", horizons, "Comma-separated horizons in seconds");
  auto* pred_opt = eval->add_option("--predictor", predictor, "cv | da | ensemble");
  auto* preds_opt = eval->add_option("--predictions", predictions, "External predictions");
  pred_opt->excludes(preds_opt);
  synth->add_option("--n", n, "Number of scenarios");
  leak->add_option("--smoothing-window", smoothing, "Centered smoothing of raw tracks");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << json({{"error", "InvalidArgument"}, {"message", e.what()}}).dump() << '\n';
    return 2;
  }

  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (!inputs.empty()) config.inputs = inputs;
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (seed) {
      config.split.seed = *seed;
      config.selection_seed = *seed;
      config.synth.seed = *seed;
    }
    if (!resample.empty()) config.resample = parse_resample_mode(resample);
    if (!variant.empty()) config.variant = variant;
    if (!horizons.empty()) config.metrics.horizons.horizons_s = parse_double_list(horizons);
    if (!predictor.empty()) {
      config.predictor = predictor;
      config.predictions.clear();
    }
    if (!predictions.empty()) config.predictions = predictions;
    if (n) config.synth.n = *n;
    if (smoothing) config.smoothing_window = *smoothing;
    config.validate();
    for (const std::string& path : config.inputs) {
      if (!fs::exists(path)) throw Error(ErrorCode::kIo, "input not found: " + path);
    }

    if (build->parsed()) return cmd_build_dataset(config, out);
    if (synth->parsed()) return cmd_synth_gen(config, out);
    if (eval->parsed()) return cmd_evaluate(config, out);
    if (leak->parsed()) return cmd_leakage_audit(config, out);
    return cmd_report(config, out);
  } catch (const Error& e) {
    err << json({{"error", to_string(e.code())}, {"message", e.what()}}).dump() << '\n';
  } catch (const std::exception& e) {
    err << json({{"error", "Internal"}, {"message", e.what()}}).dump() << '\n';
  }
  return 1;
}

}  // namespace pedbench::cli

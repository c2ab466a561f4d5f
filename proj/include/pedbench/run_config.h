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

#ifndef PEDBENCH_RUN_CONFIG_H_
#define PEDBENCH_RUN_CONFIG_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pedbench/dataset_builder.h"
#include "pedbench/metrics.h"
#include "pedbench/predictors.h"
#include "pedbench/synth_sim.h"

namespace pedbench {

// Everything a harness run depends on. Defaults reproduce the benchmark
// setup: 1 s history, 3 s future, 10 Hz, 7:1 split, 0.5 m threshold,
// lambda 5.5, horizons 1/2/3 s.
struct RunConfig {
  TaskConfig task;
  SplitConfig split;

  ResampleMode resample = ResampleMode::kAntiCausalLinear;
  TimestampUs max_match_gap_us = 60'000;
  double crop_factor = 2.0;
  std::string variant = "full";  // full | motion-changes

  double motion_threshold_m = 0.5;
  std::uint64_t selection_seed = 42;

  std::string predictor = "ensemble";
  PredictorConfig predictor_config;
  std::string calibration_split = "val";

  MetricsConfig metrics;
  std::string eval_split = "auto";  // auto | all | train | val | test

  OnsetDetector onset;
  int smoothing_window = 0;  // 0 disables the artifact

  CorpusConfig synth;

  std::vector<std::string> inputs;
  std::string predictions;
  std::string out_dir = "out";

  // Throws InvalidArgument on any out-of-range value.
  void validate() const;
  BuildConfig build_config() const;
};

struct ConfigEntry {
  std::string section;
  std::string key;
  std::string value;
};

// Every resolved value in a fixed order, formatted so that parsing it back
// yields the same config.
std::vector<ConfigEntry> config_entries(const RunConfig& config);

// INI text with [section] headers; unknown sections or keys are errors.
RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::filesystem::path& path);
std::string to_ini(const RunConfig& config);

bool operator==(const RunConfig& a, const RunConfig& b);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
double parse_double(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

}  // namespace pedbench

#endif  // PEDBENCH_RUN_CONFIG_H_

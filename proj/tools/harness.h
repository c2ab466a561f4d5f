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

#ifndef PEDBENCH_TOOLS_HARNESS_H_
#define PEDBENCH_TOOLS_HARNESS_H_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pedbench/metrics.h"
#include "pedbench/predictors.h"
#include "pedbench/run_config.h"

namespace pedbench::cli {

// Entry point shared by the binary and the tests. Returns the exit status;
// failures print one JSON line {"error", "message"} on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "auto" picks test when any test instance exists, else all.
std::vector<PredictionInstance> filter_split(std::span<const PredictionInstance> instances,
                                             const std::string& choice);

struct PredictorRun {
  KinematicPredictor predictor;
  std::vector<MultimodalPrediction> predictions;  // aligned with the eval set
  std::optional<CalibrationResult> calibration;
  std::size_t n_calibration = 0;
};

// Builds the configured predictor. The ensemble optionally tunes its weights
// and calibrates its covariances on `calibration_set` before predicting.
PredictorRun run_builtin_predictor(std::span<const PredictionInstance> eval_set,
                                   std::span<const PredictionInstance> calibration_set,
                                   const RunConfig& config);

// Rows grouped by metric, one column per horizon, one block per variant.
std::string render_table(std::span<const ReportTable> tables);

}  // namespace pedbench::cli

#endif  // PEDBENCH_TOOLS_HARNESS_H_

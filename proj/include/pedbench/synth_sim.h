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

#ifndef PEDBENCH_SYNTH_SIM_H_
#define PEDBENCH_SYNTH_SIM_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pedbench/dataset_builder.h"
#include "pedbench/trajectory_model.h"
#include "pedbench/types.h"

namespace pedbench {

enum class PhaseKind { kStand, kWalk, kAccelerate, kDecelerate, kTurn };

std::string_view to_string(PhaseKind kind);
PhaseKind parse_phase_kind(std::string_view name);

// stand: speed 0. walk: target speed. accelerate / decelerate: speed ramps
// linearly from its value at phase start to the target. turn: target speed
// while the heading changes at turn_rate.
struct Phase {
  PhaseKind kind = PhaseKind::kStand;
  double duration_s = 1.0;
  double target_speed = 0.0;  // m/s, in [0, 3]
  double turn_rate = 0.0;     // rad/s
};

struct ScenarioParams {
  std::uint64_t seed = 42;
  std::string agent_id = "synth-00000";
  std::string camera_view = "front";
  std::vector<Phase> script;
  Vec2 origin = Vec2::Zero();
  double initial_heading = 0.0;  // rad
  double noise_sigma = 0.05;     // m, per axis
  double native_rate_hz = 2.0;
  double fine_rate_hz = 10.0;
  Vec3 box_size{0.7, 0.7, 1.75};

  double duration_s() const;
  // Throws InvalidScript.
  void validate() const;
};

struct SyntheticTrack {
  ResampledTrack truth;  // fine rate, noiseless
  RawTrack observed;     // native rate, noisy
  std::vector<PhaseKind> mode_labels;  // per truth step
};

// Integrates the script on the fine grid (exact for straight phases and
// linear ramps; turns advance along the chord), subsamples to the native
// rate and adds seeded Gaussian noise. Bitwise deterministic per seed.
SyntheticTrack generate_scenario(const ScenarioParams& params);

// Centered moving average over `window` samples, narrowed symmetrically at
// the ends. Deliberately uses future samples. `window` must be odd and >= 3.
RawTrack apply_smoothing_artifact(const RawTrack& track, int window);

struct CorpusConfig {
  std::size_t n = 2000;
  std::uint64_t seed = 42;
  double duration_s = 6.0;
  double noise_sigma = 0.05;
  double native_rate_hz = 2.0;
  double fine_rate_hz = 10.0;
  double ramp_s = 0.5;  // walk initiation / stopping ramp
};

// Randomised scripts, one stream per scenario derived from (seed, index).
// Scenario categories cycle: 20% stand->walk, 20% walk->stand (transition
// between 1 s and duration - ramp), 30% steady walk, 25% standing, 5% turns.
std::vector<ScenarioParams> draw_corpus_scenarios(const CorpusConfig& config);

struct Corpus {
  std::vector<ScenarioParams> scenarios;
  std::vector<RawTrackRecord> raw;
  std::vector<PredictionInstance> instances;  // full variant, flags set
  std::vector<PredictionInstance> motion_changes;
  std::vector<std::string> warnings;
};

// Scenarios -> observed raw tracks -> build_dataset. Crop refs stay empty.
Corpus generate_corpus(const CorpusConfig& config, const BuildConfig& build);

// JSON sidecar describing every scenario script.
void write_scenarios(const std::filesystem::path& path, const CorpusConfig& config,
                     const std::vector<ScenarioParams>& scenarios);

}  // namespace pedbench

#endif  // PEDBENCH_SYNTH_SIM_H_

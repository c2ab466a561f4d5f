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

#ifndef PEDBENCH_DATASET_BUILDER_H_
#define PEDBENCH_DATASET_BUILDER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pedbench/camera_geometry.h"
#include "pedbench/instance.h"
#include "pedbench/trajectory_model.h"
#include "pedbench/types.h"

namespace pedbench {

struct TaskConfig {
  double history_s = 1.0;
  double future_s = 3.0;
  double rate_hz = 10.0;
  int window_stride = 5;  // steps

  int history_steps() const { return steps_for_duration(history_s, rate_hz); }
  int future_steps() const { return steps_for_duration(future_s, rate_hz); }
  void validate() const;
};

// Deterministic 16-hex-digit FNV-1a hash of (agent, view, window start).
std::string make_instance_id(const std::string& agent_id,
                             const std::string& camera_view,
                             TimestampUs window_start);

// ADE of the constant-velocity predictor over the whole future window.
double compute_cv_ade(const PredictionInstance& instance,
                      const KinematicsOptions& options = {});

// Sliding windows of history + future steps every `window_stride` steps,
// starting at the first step. Tracks shorter than one window give nothing.
// Every instance starts in the train split with motion_change unset.
std::vector<PredictionInstance> extract_instances(
    const ResampledTrack& track, const TaskConfig& config,
    const KinematicsOptions& options = {});

struct MotionChangeSelection {
  std::vector<PredictionInstance> tagged;   // input, flags set, id order
  std::vector<PredictionInstance> variant;  // flagged + equal random remainder
  std::size_t flagged = 0;
  bool insufficient_remainder = false;  // every unflagged instance was taken
};

// Flags cv_ade >= threshold (inclusive) and samples as many unflagged
// instances as there are flagged ones, uniformly with `seed`. Outputs are
// sorted by instance_id.
MotionChangeSelection select_motion_changes(
    std::vector<PredictionInstance> instances, double threshold_m = 0.5,
    std::uint64_t seed = 42);

struct SplitConfig {
  int train_parts = 7;
  int val_parts = 1;
  std::uint64_t seed = 42;

  void validate() const;
};

// Shuffles the (sorted, deduplicated) ids with `seed`; the first
// ceil(train / (train + val) * N) go to train, the rest to val.
std::map<std::string, Split> assign_splits(std::vector<std::string> agent_ids,
                                           const SplitConfig& config);

struct OnsetDetector {
  double v_on = 0.25;      // m/s
  double sustain_s = 0.3;  // s
};

// First sample time t_i where the speed over the window ending at t_i stays
// >= v_on at every sample in [t_i, t_i + sustain]; the track must reach
// t_i + sustain. The speed at t is |p(t) - p(t')| / (t - t'), with t' the
// latest sample at or before t - window_us.
std::optional<TimestampUs> detect_onset(std::span<const TimedPoint> track,
                                        TimestampUs window_us,
                                        const OnsetDetector& detector = {});

struct LeakageEntry {
  std::string agent_id;
  std::string camera_view;
  std::optional<TimestampUs> raw_onset;
  std::optional<TimestampUs> resampled_onset;
  // raw onset - resampled onset; positive means the resampled track moves
  // before the raw data supports. Absent with NoOnsetDetected.
  std::optional<double> lead_s;
};

// Onsets of both tracks with a speed window equal to the shortest raw
// sampling interval, so a held copy of the raw track reads the same speeds
// as the raw track itself.
LeakageEntry audit_leakage(const RawTrack& raw, const ResampledTrack& resampled,
                           const OnsetDetector& detector = {});

struct LeakageReport {
  std::vector<LeakageEntry> entries;
  std::size_t n_with_lead = 0;
  std::size_t n_positive = 0;
  double mean_positive_lead_s = 0.0;
  double max_lead_s = 0.0;
};

LeakageReport summarize_leakage(std::vector<LeakageEntry> entries);

// Camera intrinsics plus the frames of one view. A frame without its own
// extrinsics uses the camera's.
struct CameraFrame {
  std::string token;
  TimestampUs t = 0;
  std::optional<Mat3> rotation;
  std::optional<Vec3> translation;
};

struct CameraRig {
  CameraModel camera;
  std::vector<CameraFrame> frames;  // ascending t
};

struct RawTrackRecord {
  RawTrack track;
  // Split of the source dataset: "val" sources become the test split.
  std::optional<Split> source_split;
  std::optional<CameraRig> rig;
};

// Matches frames and fills each matched step's crop from the raw box at the
// step time. Frames with the box fully behind the camera keep no crop.
ResampledTrack attach_crops(const ResampledTrack& track, const RawTrack& raw,
                            const CameraRig& rig, ResampleMode mode,
                            TimestampUs max_gap_us, double crop_factor);

struct BuildConfig {
  TaskConfig task;
  SplitConfig split;
  ResampleMode mode = ResampleMode::kAntiCausalLinear;
  TimestampUs max_match_gap_us = 60'000;
  double crop_factor = 2.0;
  double motion_threshold_m = 0.5;
  std::uint64_t selection_seed = 42;
  KinematicsOptions kinematics;
};

struct BuiltDataset {
  std::vector<PredictionInstance> full;
  std::vector<PredictionInstance> motion_changes;
  std::vector<std::string> warnings;
};

// Flags and selects the motion-changes variant independently within each
// split. Both outputs are sorted by instance_id.
BuiltDataset select_by_split(std::vector<PredictionInstance> instances,
                             double threshold_m, std::uint64_t seed);

// Resample, crop, window, split, tag. Agents from a "val" source go to test;
// the rest are split 7:1 by agent. The motion-changes variant is selected
// per split so each split stays balanced.
BuiltDataset build_dataset(std::span<const RawTrackRecord> records,
                           const BuildConfig& config);

}  // namespace pedbench

#endif  // PEDBENCH_DATASET_BUILDER_H_

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

#ifndef PEDBENCH_TRAJECTORY_MODEL_H_
#define PEDBENCH_TRAJECTORY_MODEL_H_

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pedbench/camera_geometry.h"
#include "pedbench/types.h"

namespace pedbench {

// One low-rate 3D box annotation.
struct RawSample {
  TimestampUs t = 0;
  Vec3 position = Vec3::Zero();
  Vec3 box_size = Vec3::Ones();  // (length, width, height)
  double yaw = 0.0;
};

// Annotations of one pedestrian as seen from one camera view.
struct RawTrack {
  std::string agent_id;
  std::string camera_view;
  std::vector<RawSample> samples;
};

struct CameraFrameRef {
  std::string frame_token;
  TimestampUs frame_timestamp = 0;
  std::optional<SquareCrop> crop;

  bool operator==(const CameraFrameRef&) const = default;
};

struct ResampledStep {
  TimestampUs t = 0;
  Vec2 position = Vec2::Zero();
  std::optional<CameraFrameRef> frame_ref;
};

struct ResampledTrack {
  std::string agent_id;
  std::string camera_view;
  double rate_hz = 10.0;
  std::vector<ResampledStep> steps;
};

enum class ResampleMode {
  // Linear interpolation between the bracketing raw samples. Reads one sample
  // ahead of every grid time, which is what leaks future motion.
  kAntiCausalLinear,
  // Latest raw sample at or before the grid time.
  kCausalHold,
};

std::string_view to_string(ResampleMode mode);
ResampleMode parse_resample_mode(std::string_view name);

// Checks strictly increasing timestamps and positive box sizes.
void validate_raw_track(const RawTrack& raw);

// Fixed-rate grid aligned to the first raw timestamp, ending at or before the
// last raw timestamp. The vertical axis is dropped.
ResampledTrack resample_track(const RawTrack& raw, double rate_hz,
                              ResampleMode mode);

// Raw 3D state (center, size, yaw) at `t` under the same interpolation rule
// as resample_track. `t` must lie inside the raw span.
Box3D box_at(const RawTrack& raw, TimestampUs t, ResampleMode mode);

struct CameraTimestamp {
  std::string frame_token;
  TimestampUs t = 0;
};

// Attaches the nearest camera frame to every step. Steps whose nearest frame
// is more than `max_gap_us` away get no frame; equal gaps go to the earlier
// frame. An existing ref pointing at the same frame is kept as-is, so crops
// survive a second pass.
ResampledTrack match_camera_frames(const ResampledTrack& track,
                                   std::span<const CameraTimestamp> frames,
                                   TimestampUs max_gap_us = 60'000);

struct KinematicState {
  TimestampUs t = 0;  // last history step
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  Vec2 acceleration = Vec2::Zero();
  double speed = 0.0;
  // Absent when neither the fitted velocity nor any single history step moved
  // faster than the heading threshold.
  std::optional<double> heading;
  // Unit vector of the longest displacement from an earlier history point to
  // the last one; absent only when every history point coincides.
  std::optional<Vec2> fallback_direction;
};

struct KinematicsOptions {
  double heading_min_speed = 0.1;  // m/s
};

// Per-axis least-squares quadratic x(tau) = c0 + c1 tau + c2 tau^2 with tau in
// seconds measured back from the last history point: velocity = c1,
// acceleration = 2 c2. Two points give a finite difference and zero
// acceleration.
KinematicState estimate_kinematics(std::span<const TimedPoint> history,
                                   const KinematicsOptions& options = {});

}  // namespace pedbench

#endif  // PEDBENCH_TRAJECTORY_MODEL_H_

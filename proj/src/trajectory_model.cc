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

#include "pedbench/trajectory_model.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "pedbench/error.h"

namespace pedbench {
namespace {

double wrap_angle(double angle) {
  return std::remainder(angle, 2.0 * std::numbers::pi);
}

// Index of the last sample with t <= query. Requires query >= first sample.
std::size_t hold_index(const std::vector<RawSample>& samples, TimestampUs t) {
  const auto it = std::upper_bound(
      samples.begin(), samples.end(), t,
      [](TimestampUs value, const RawSample& s) { return value < s.t; });
  return static_cast<std::size_t>(it - samples.begin()) - 1;
}

void check_span(const RawTrack& raw, TimestampUs t) {
  if (t < raw.samples.front().t || t > raw.samples.back().t) {
    throw Error(ErrorCode::kInvalidArgument,
                "time " + std::to_string(t) + " outside the raw track span");
  }
}

}  // namespace

std::string_view to_string(ResampleMode mode) {
  return mode == ResampleMode::kAntiCausalLinear ? "anti-causal" : "causal";
}

ResampleMode parse_resample_mode(std::string_view name) {
  if (name == "anti-causal" || name == "anti_causal_linear") {
    return ResampleMode::kAntiCausalLinear;
  }
  if (name == "causal" || name == "causal_hold") return ResampleMode::kCausalHold;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown resample mode '" + std::string(name) + "'");
}

void validate_raw_track(const RawTrack& raw) {
  for (std::size_t i = 0; i < raw.samples.size(); ++i) {
    const RawSample& s = raw.samples[i];
    if (i > 0 && s.t <= raw.samples[i - 1].t) {
      throw Error(ErrorCode::kNonMonotonicTimestamps,
                  "track " + raw.agent_id + "/" + raw.camera_view +
                      ": timestamps not strictly increasing at sample " +
                      std::to_string(i));
    }
    if (!(s.box_size.minCoeff() > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "track " + raw.agent_id + ": box size must be positive");
    }
    if (!s.position.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "track " + raw.agent_id + ": non-finite position");
    }
  }
}

ResampledTrack resample_track(const RawTrack& raw, double rate_hz,
                              ResampleMode mode) {
  if (raw.samples.size() < 2) {
    throw Error(ErrorCode::kTooFewSamples,
                "resampling needs at least 2 samples, track " + raw.agent_id +
                    " has " + std::to_string(raw.samples.size()));
  }
  validate_raw_track(raw);
  const TimestampUs step = period_us(rate_hz);

  ResampledTrack out;
  out.agent_id = raw.agent_id;
  out.camera_view = raw.camera_view;
  out.rate_hz = rate_hz;
  const TimestampUs first = raw.samples.front().t;
  const TimestampUs last = raw.samples.back().t;
  out.steps.reserve(static_cast<std::size_t>((last - first) / step + 1));

  std::size_t j = 0;  // bracketing sample, advanced monotonically
  for (TimestampUs t = first; t <= last; t += step) {
    while (j + 1 < raw.samples.size() && raw.samples[j + 1].t <= t) ++j;
    const RawSample& a = raw.samples[j];
    Vec2 position = a.position.head<2>();
    if (mode == ResampleMode::kAntiCausalLinear && t > a.t) {
      const RawSample& b = raw.samples[j + 1];
      const double alpha =
          static_cast<double>(t - a.t) / static_cast<double>(b.t - a.t);
      position += alpha * (b.position.head<2>() - a.position.head<2>());
    }
    out.steps.push_back({t, position, std::nullopt});
  }
  return out;
}

Box3D box_at(const RawTrack& raw, TimestampUs t, ResampleMode mode) {
  if (raw.samples.empty()) {
    throw Error(ErrorCode::kTooFewSamples, "empty raw track");
  }
  check_span(raw, t);
  const std::size_t j = hold_index(raw.samples, t);
  const RawSample& a = raw.samples[j];
  if (mode == ResampleMode::kCausalHold || a.t == t) {
    return {a.position, a.box_size, a.yaw};
  }
  const RawSample& b = raw.samples[j + 1];
  const double alpha =
      static_cast<double>(t - a.t) / static_cast<double>(b.t - a.t);
  return {a.position + alpha * (b.position - a.position),
          a.box_size + alpha * (b.box_size - a.box_size),
          wrap_angle(a.yaw + alpha * wrap_angle(b.yaw - a.yaw))};
}

ResampledTrack match_camera_frames(const ResampledTrack& track,
                                   std::span<const CameraTimestamp> frames,
                                   TimestampUs max_gap_us) {
  ResampledTrack out = track;
  for (ResampledStep& step : out.steps) {
    const auto next = std::lower_bound(
        frames.begin(), frames.end(), step.t,
        [](const CameraTimestamp& f, TimestampUs t) { return f.t < t; });
    const CameraTimestamp* best = nullptr;
    if (next != frames.begin()) best = &*std::prev(next);
    if (next != frames.end() &&
        (best == nullptr || next->t - step.t < step.t - best->t)) {
      best = &*next;
    }
    if (best == nullptr || std::abs(best->t - step.t) > max_gap_us) {
      step.frame_ref.reset();
      continue;
    }
    if (step.frame_ref && step.frame_ref->frame_token == best->frame_token &&
        step.frame_ref->frame_timestamp == best->t) {
      continue;
    }
    step.frame_ref = CameraFrameRef{best->frame_token, best->t, std::nullopt};
  }
  return out;
}

KinematicState estimate_kinematics(std::span<const TimedPoint> history,
                                   const KinematicsOptions& options) {
  const std::size_t n = history.size();
  if (n < 2) {
    throw Error(ErrorCode::kTooFewSamples,
                "kinematics need at least 2 history points");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (history[i].t <= history[i - 1].t) {
      throw Error(ErrorCode::kNonMonotonicTimestamps,
                  "history timestamps not strictly increasing");
    }
  }

  KinematicState state;
  const TimedPoint& last = history.back();
  state.t = last.t;
  state.position = last.position;

  if (n == 2) {
    state.velocity = (last.position - history[0].position) /
                     to_seconds(last.t - history[0].t);
  } else {
    Eigen::MatrixXd design(n, 3);
    Eigen::MatrixXd targets(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
      const double tau = to_seconds(history[i].t - last.t);
      design.row(static_cast<Eigen::Index>(i)) << 1.0, tau, tau * tau;
      targets.row(static_cast<Eigen::Index>(i)) = history[i].position.transpose();
    }
    const Eigen::MatrixXd coeffs = design.colPivHouseholderQr().solve(targets);
    state.velocity = coeffs.row(1).transpose();
    state.acceleration = 2.0 * coeffs.row(2).transpose();
  }
  state.speed = state.velocity.norm();

  if (state.speed >= options.heading_min_speed) {
    state.heading = std::atan2(state.velocity.y(), state.velocity.x());
  } else {
    for (std::size_t i = n - 1; i >= 1; --i) {
      const Vec2 step_velocity = (history[i].position - history[i - 1].position) /
                                 to_seconds(history[i].t - history[i - 1].t);
      if (step_velocity.norm() >= options.heading_min_speed) {
        state.heading = std::atan2(step_velocity.y(), step_velocity.x());
        break;
      }
    }
  }

  double longest = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec2 d = last.position - history[i].position;
    if (d.norm() > longest) {
      longest = d.norm();
      state.fallback_direction = d / longest;
    }
  }
  return state;
}

}  // namespace pedbench

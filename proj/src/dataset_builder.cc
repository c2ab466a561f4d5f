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

#include "pedbench/dataset_builder.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <unordered_map>

#include "pedbench/error.h"
#include "pedbench/parallel.h"
#include "pedbench/predictors.h"

namespace pedbench {
namespace {

std::vector<TimedPoint> to_points(const std::vector<ResampledStep>& steps) {
  std::vector<TimedPoint> out;
  out.reserve(steps.size());
  for (const ResampledStep& s : steps) out.push_back({s.t, s.position});
  return out;
}

std::vector<TimedPoint> to_points(const std::vector<RawSample>& samples) {
  std::vector<TimedPoint> out;
  out.reserve(samples.size());
  for (const RawSample& s : samples) out.push_back({s.t, s.position.head<2>()});
  return out;
}

bool by_id(const PredictionInstance& a, const PredictionInstance& b) {
  return a.instance_id < b.instance_id;
}

}  // namespace

void TaskConfig::validate() const {
  history_steps();
  future_steps();
  period_us(rate_hz);
  if (history_steps() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "history needs at least 2 steps");
  }
  if (window_stride < 1) {
    throw Error(ErrorCode::kInvalidArgument, "window stride must be >= 1");
  }
}

void SplitConfig::validate() const {
  if (train_parts < 1 || val_parts < 1) {
    throw Error(ErrorCode::kInvalidArgument, "split ratio parts must be positive");
  }
}

std::string make_instance_id(const std::string& agent_id,
                             const std::string& camera_view,
                             TimestampUs window_start) {
  std::uint64_t hash = 14695981039346656037ull;
  auto mix = [&hash](std::string_view bytes) {
    for (const char c : bytes) {
      hash ^= static_cast<unsigned char>(c);
      hash *= 1099511628211ull;
    }
  };
  mix(agent_id);
  mix("\x1f");
  mix(camera_view);
  mix("\x1f");
  mix(std::to_string(window_start));
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(hash));
  return buffer;
}

double compute_cv_ade(const PredictionInstance& instance,
                      const KinematicsOptions& options) {
  if (instance.future.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "instance has no future");
  }
  const KinematicState state = estimate_kinematics(instance.history, options);
  const auto& h = instance.history;
  const double dt = to_seconds(h[h.size() - 1].t - h[h.size() - 2].t);
  const auto means =
      predict_cv(state, static_cast<int>(instance.future.size()), dt);
  double sum = 0.0;
  for (std::size_t k = 0; k < means.size(); ++k) {
    sum += (means[k] - instance.future[k].position).norm();
  }
  return sum / static_cast<double>(instance.future.size());
}

std::vector<PredictionInstance> extract_instances(
    const ResampledTrack& track, const TaskConfig& config,
    const KinematicsOptions& options) {
  config.validate();
  if (std::abs(track.rate_hz - config.rate_hz) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "track rate does not match the task rate");
  }
  const auto history = static_cast<std::size_t>(config.history_steps());
  const auto future = static_cast<std::size_t>(config.future_steps());
  const std::size_t window = history + future;
  const TimestampUs period = period_us(config.rate_hz);
  for (std::size_t i = 1; i < track.steps.size(); ++i) {
    if (track.steps[i].t - track.steps[i - 1].t != period) {
      throw Error(ErrorCode::kInvalidArgument,
                  "track " + track.agent_id + " is not on a contiguous grid");
    }
  }

  std::vector<PredictionInstance> out;
  const auto stride = static_cast<std::size_t>(config.window_stride);
  for (std::size_t start = 0; start + window <= track.steps.size(); start += stride) {
    PredictionInstance instance;
    instance.agent_id = track.agent_id;
    instance.camera_view = track.camera_view;
    instance.instance_id =
        make_instance_id(track.agent_id, track.camera_view, track.steps[start].t);
    for (std::size_t k = start; k < start + window; ++k) {
      const ResampledStep& step = track.steps[k];
      if (k < start + history) {
        instance.history.push_back({step.t, step.position});
        std::optional<CropRef> crop;
        if (step.frame_ref && step.frame_ref->crop) {
          crop = CropRef{step.frame_ref->frame_token, *step.frame_ref->crop};
        }
        instance.crop_refs.push_back(std::move(crop));
      } else {
        instance.future.push_back({step.t, step.position});
      }
    }
    instance.cv_ade = compute_cv_ade(instance, options);
    out.push_back(std::move(instance));
  }
  return out;
}

MotionChangeSelection select_motion_changes(
    std::vector<PredictionInstance> instances, double threshold_m,
    std::uint64_t seed) {
  std::sort(instances.begin(), instances.end(), by_id);
  MotionChangeSelection out;
  std::vector<std::size_t> unflagged;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    instances[i].motion_change = instances[i].cv_ade >= threshold_m;
    if (instances[i].motion_change) {
      ++out.flagged;
      out.variant.push_back(instances[i]);
    } else {
      unflagged.push_back(i);
    }
  }
  if (unflagged.size() < out.flagged) {
    out.insufficient_remainder = true;
  } else {
    std::mt19937_64 rng(seed);
    std::shuffle(unflagged.begin(), unflagged.end(), rng);
    unflagged.resize(out.flagged);
  }
  for (const std::size_t i : unflagged) out.variant.push_back(instances[i]);
  std::sort(out.variant.begin(), out.variant.end(), by_id);
  out.tagged = std::move(instances);
  return out;
}

std::map<std::string, Split> assign_splits(std::vector<std::string> agent_ids,
                                           const SplitConfig& config) {
  config.validate();
  std::sort(agent_ids.begin(), agent_ids.end());
  agent_ids.erase(std::unique(agent_ids.begin(), agent_ids.end()), agent_ids.end());
  std::mt19937_64 rng(config.seed);
  std::shuffle(agent_ids.begin(), agent_ids.end(), rng);

  const std::size_t total = static_cast<std::size_t>(config.train_parts + config.val_parts);
  const std::size_t n_train =
      (static_cast<std::size_t>(config.train_parts) * agent_ids.size() + total - 1) / total;
  std::map<std::string, Split> out;
  for (std::size_t i = 0; i < agent_ids.size(); ++i) {
    out[agent_ids[i]] = i < n_train ? Split::kTrain : Split::kVal;
  }
  return out;
}

std::optional<TimestampUs> detect_onset(std::span<const TimedPoint> track,
                                        TimestampUs window_us,
                                        const OnsetDetector& detector) {
  if (track.empty() || window_us <= 0) return std::nullopt;
  const auto sustain_us =
      static_cast<TimestampUs>(std::llround(detector.sustain_s * kMicrosPerSecond));

  std::vector<std::optional<double>> speed(track.size());
  for (std::size_t i = 0; i < track.size(); ++i) {
    const TimestampUs cutoff = track[i].t - window_us;
    const auto it = std::upper_bound(
        track.begin(), track.end(), cutoff,
        [](TimestampUs t, const TimedPoint& p) { return t < p.t; });
    if (it == track.begin()) continue;
    const TimedPoint& ref = *std::prev(it);
    speed[i] = (track[i].position - ref.position).norm() / to_seconds(track[i].t - ref.t);
  }

  const TimestampUs last = track.back().t;
  for (std::size_t i = 0; i < track.size(); ++i) {
    if (!speed[i] || *speed[i] < detector.v_on) continue;
    if (track[i].t + sustain_us > last) break;
    bool sustained = true;
    for (std::size_t j = i + 1; j < track.size() && track[j].t <= track[i].t + sustain_us; ++j) {
      if (!speed[j] || *speed[j] < detector.v_on) {
        sustained = false;
        break;
      }
    }
    if (sustained) return track[i].t;
  }
  return std::nullopt;
}

LeakageEntry audit_leakage(const RawTrack& raw, const ResampledTrack& resampled,
                           const OnsetDetector& detector) {
  if (raw.samples.size() < 2 || resampled.steps.empty()) {
    throw Error(ErrorCode::kTooFewSamples, "leakage audit needs two tracks with data");
  }
  validate_raw_track(raw);
  if (resampled.steps.front().t < raw.samples.front().t ||
      resampled.steps.back().t > raw.samples.back().t) {
    throw Error(ErrorCode::kInvalidArgument,
                "resampled track extends beyond the raw span");
  }
  TimestampUs window = raw.samples[1].t - raw.samples[0].t;
  for (std::size_t i = 2; i < raw.samples.size(); ++i) {
    window = std::min(window, raw.samples[i].t - raw.samples[i - 1].t);
  }

  LeakageEntry entry;
  entry.agent_id = raw.agent_id;
  entry.camera_view = raw.camera_view;
  const auto raw_points = to_points(raw.samples);
  const auto resampled_points = to_points(resampled.steps);
  entry.raw_onset = detect_onset(raw_points, window, detector);
  entry.resampled_onset = detect_onset(resampled_points, window, detector);
  if (entry.raw_onset && entry.resampled_onset) {
    entry.lead_s = to_seconds(*entry.raw_onset - *entry.resampled_onset);
  }
  return entry;
}

LeakageReport summarize_leakage(std::vector<LeakageEntry> entries) {
  LeakageReport report;
  double positive_sum = 0.0;
  for (const LeakageEntry& e : entries) {
    if (!e.lead_s) continue;
    if (report.n_with_lead == 0 || *e.lead_s > report.max_lead_s) {
      report.max_lead_s = *e.lead_s;
    }
    ++report.n_with_lead;
    if (*e.lead_s > 0.0) {
      ++report.n_positive;
      positive_sum += *e.lead_s;
    }
  }
  if (report.n_positive > 0) {
    report.mean_positive_lead_s = positive_sum / static_cast<double>(report.n_positive);
  }
  report.entries = std::move(entries);
  return report;
}

ResampledTrack attach_crops(const ResampledTrack& track, const RawTrack& raw,
                            const CameraRig& rig, ResampleMode mode,
                            TimestampUs max_gap_us, double crop_factor) {
  std::vector<CameraTimestamp> stamps;
  stamps.reserve(rig.frames.size());
  std::unordered_map<std::string, const CameraFrame*> frames;
  for (const CameraFrame& f : rig.frames) {
    if (!stamps.empty() && f.t < stamps.back().t) {
      throw Error(ErrorCode::kNonMonotonicTimestamps, "camera frames not sorted");
    }
    stamps.push_back({f.token, f.t});
    frames[f.token] = &f;
  }
  ResampledTrack out = match_camera_frames(track, stamps, max_gap_us);
  for (ResampledStep& step : out.steps) {
    if (!step.frame_ref || step.frame_ref->crop) continue;
    const CameraFrame& frame = *frames.at(step.frame_ref->frame_token);
    const CameraModel camera =
        frame.rotation || frame.translation
            ? rig.camera.with_extrinsics(frame.rotation.value_or(rig.camera.rotation()),
                                         frame.translation.value_or(rig.camera.translation()))
            : rig.camera;
    try {
      step.frame_ref->crop =
          expand_crop(project_box(camera, box_at(raw, step.t, mode)), crop_factor);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kFullyBehindCamera &&
          e.code() != ErrorCode::kDegenerateBox) {
        throw;
      }
    }
  }
  return out;
}

BuiltDataset select_by_split(std::vector<PredictionInstance> instances,
                             double threshold_m, std::uint64_t seed) {
  BuiltDataset out;
  std::map<Split, std::vector<PredictionInstance>> by_split;
  for (PredictionInstance& instance : instances) {
    by_split[instance.split].push_back(std::move(instance));
  }
  for (auto& [split, members] : by_split) {
    MotionChangeSelection selection =
        select_motion_changes(std::move(members), threshold_m, seed);
    if (selection.insufficient_remainder) {
      out.warnings.push_back("InsufficientRemainder: split " +
                             std::string(to_string(split)) + " has " +
                             std::to_string(selection.flagged) +
                             " flagged instances but fewer unflagged ones");
    }
    for (auto& x : selection.tagged) out.full.push_back(std::move(x));
    for (auto& x : selection.variant) out.motion_changes.push_back(std::move(x));
  }
  std::sort(out.full.begin(), out.full.end(), by_id);
  std::sort(out.motion_changes.begin(), out.motion_changes.end(), by_id);
  return out;
}

BuiltDataset build_dataset(std::span<const RawTrackRecord> records,
                           const BuildConfig& config) {
  config.task.validate();
  BuiltDataset out;

  std::map<std::string, Split> split_of;
  std::set<std::string> train_source, val_source;
  for (const RawTrackRecord& r : records) {
    (r.source_split == Split::kVal || r.source_split == Split::kTest ? val_source
                                                                     : train_source)
        .insert(r.track.agent_id);
  }
  for (const std::string& agent : val_source) {
    if (train_source.count(agent)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "agent " + agent + " appears in both source splits");
    }
    split_of[agent] = Split::kTest;
  }
  for (const auto& [agent, split] : assign_splits(
           std::vector<std::string>(train_source.begin(), train_source.end()),
           config.split)) {
    split_of[agent] = split;
  }

  std::vector<std::vector<PredictionInstance>> per_track(records.size());
  parallel_for(records.size(), [&](std::size_t i) {
    const RawTrackRecord& record = records[i];
    if (record.track.samples.size() < 2) return;
    ResampledTrack track = resample_track(record.track, config.task.rate_hz, config.mode);
    if (record.rig) {
      track = attach_crops(track, record.track, *record.rig, config.mode,
                           config.max_match_gap_us, config.crop_factor);
    }
    per_track[i] = extract_instances(track, config.task, config.kinematics);
    for (PredictionInstance& instance : per_track[i]) {
      instance.split = split_of.at(instance.agent_id);
    }
  });

  std::vector<PredictionInstance> all;
  for (auto& instances : per_track) {
    for (PredictionInstance& instance : instances) all.push_back(std::move(instance));
  }
  BuiltDataset selected =
      select_by_split(std::move(all), config.motion_threshold_m, config.selection_seed);
  out.full = std::move(selected.full);
  out.motion_changes = std::move(selected.motion_changes);
  out.warnings = std::move(selected.warnings);
  for (std::size_t i = 1; i < out.full.size(); ++i) {
    if (out.full[i].instance_id == out.full[i - 1].instance_id) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate instance " + out.full[i].instance_id +
                      " (repeated agent/view track?)");
    }
  }
  return out;
}

}  // namespace pedbench

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

#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "pedbench/predictors.h"
#include "pedbench/synth_sim.h"
#include "test_util.h"

namespace pedbench {
namespace {

using test::code_of;
using test::raw_track;

ResampledTrack straight_track(const std::string& agent, int steps, Vec2 velocity = Vec2(1, 0)) {
  ResampledTrack track;
  track.agent_id = agent;
  track.camera_view = "front";
  for (int k = 0; k < steps; ++k) {
    track.steps.push_back({k * 100'000, velocity * (0.1 * k), std::nullopt});
  }
  return track;
}

TEST(ExtractInstances, WindowCounts) {
  const TaskConfig cfg;
  EXPECT_EQ(extract_instances(straight_track("a", 50), cfg).size(), 3u);
  EXPECT_EQ(extract_instances(straight_track("a", 40), cfg).size(), 1u);
  EXPECT_EQ(extract_instances(straight_track("a", 39), cfg).size(), 0u);
}

TEST(ExtractInstances, WindowContents) {
  const auto instances = extract_instances(straight_track("a", 50), TaskConfig{});
  ASSERT_EQ(instances.size(), 3u);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const PredictionInstance& x = instances[i];
    ASSERT_EQ(x.history.size(), 10u);
    ASSERT_EQ(x.future.size(), 30u);
    EXPECT_EQ(x.crop_refs.size(), 10u);
    EXPECT_EQ(x.history.front().t, static_cast<TimestampUs>(i) * 500'000);
    EXPECT_EQ(x.future.front().t - x.history.back().t, 100'000);
    EXPECT_NEAR(x.cv_ade, 0.0, 1e-12);
    EXPECT_EQ(x.instance_id, make_instance_id("a", "front", x.history.front().t));
  }
}

TEST(ExtractInstances, RejectsGapsAndRateMismatch) {
  ResampledTrack track = straight_track("a", 45);
  track.steps.erase(track.steps.begin() + 20);
  EXPECT_EQ(code_of([&] { extract_instances(track, TaskConfig{}); }),
            ErrorCode::kInvalidArgument);
  ResampledTrack other = straight_track("a", 45);
  other.rate_hz = 20.0;
  EXPECT_EQ(code_of([&] { extract_instances(other, TaskConfig{}); }),
            ErrorCode::kInvalidArgument);
}

TEST(MakeInstanceId, StableHex) {
  const std::string id = make_instance_id("agent", "front", 1'000'000);
  EXPECT_EQ(id.size(), 16u);
  EXPECT_EQ(id.find_first_not_of("0123456789abcdef"), std::string::npos);
  EXPECT_EQ(id, make_instance_id("agent", "front", 1'000'000));
  EXPECT_NE(id, make_instance_id("agent", "back", 1'000'000));
  EXPECT_NE(id, make_instance_id("agent", "front", 1'100'000));
}

PredictionInstance with_ade(const std::string& id, double ade) {
  PredictionInstance x;
  x.instance_id = id;
  x.cv_ade = ade;
  return x;
}

TEST(SelectMotionChanges, InclusiveThreshold) {
  const auto sel = select_motion_changes(
      {with_ade("a", 0.6), with_ade("b", 0.5), with_ade("c", 0.4999999), with_ade("d", 0.1)},
      0.5, 1);
  ASSERT_EQ(sel.tagged.size(), 4u);
  EXPECT_TRUE(sel.tagged[0].motion_change);
  EXPECT_TRUE(sel.tagged[1].motion_change);
  EXPECT_FALSE(sel.tagged[2].motion_change);
  EXPECT_FALSE(sel.tagged[3].motion_change);
  EXPECT_EQ(sel.flagged, 2u);
  EXPECT_EQ(sel.variant.size(), 4u);
}

TEST(SelectMotionChanges, EqualCountSample) {
  std::vector<PredictionInstance> instances;
  for (int i = 0; i < 400; ++i) {
    instances.push_back(with_ade("id" + std::to_string(1000 + i), i < 100 ? 0.9 : 0.1));
  }
  const auto sel = select_motion_changes(instances, 0.5, 42);
  EXPECT_EQ(sel.flagged, 100u);
  EXPECT_EQ(sel.variant.size(), 200u);
  EXPECT_FALSE(sel.insufficient_remainder);
  std::set<std::string> ids;
  int flagged = 0;
  for (const auto& x : sel.variant) {
    ids.insert(x.instance_id);
    flagged += x.motion_change;
  }
  EXPECT_EQ(ids.size(), 200u);
  EXPECT_EQ(flagged, 100);
  EXPECT_TRUE(std::is_sorted(sel.variant.begin(), sel.variant.end(),
                             [](const auto& a, const auto& b) {
                               return a.instance_id < b.instance_id;
                             }));

  const auto again = select_motion_changes(instances, 0.5, 42);
  EXPECT_EQ(again.variant, sel.variant);
  const auto other = select_motion_changes(instances, 0.5, 43);
  EXPECT_NE(other.variant, sel.variant);
}

TEST(SelectMotionChanges, InsufficientRemainder) {
  const auto sel = select_motion_changes(
      {with_ade("a", 0.9), with_ade("b", 0.8), with_ade("c", 0.1)}, 0.5, 1);
  EXPECT_TRUE(sel.insufficient_remainder);
  EXPECT_EQ(sel.variant.size(), 3u);
}

std::vector<std::string> agent_names(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("agent-" + std::to_string(i));
  return out;
}

TEST(AssignSplits, SevenToOne) {
  for (const auto& [n, train] : {std::pair{800, 700}, std::pair{8, 7}, std::pair{9, 8}}) {
    const auto splits = assign_splits(agent_names(n), SplitConfig{});
    ASSERT_EQ(splits.size(), static_cast<std::size_t>(n));
    int n_train = 0;
    for (const auto& [agent, split] : splits) n_train += split == Split::kTrain;
    EXPECT_EQ(n_train, train) << "n=" << n;
  }
}

TEST(AssignSplits, Deterministic) {
  const auto a = assign_splits(agent_names(100), SplitConfig{});
  const auto b = assign_splits(agent_names(100), SplitConfig{});
  EXPECT_EQ(a, b);
  auto shuffled = agent_names(100);
  std::reverse(shuffled.begin(), shuffled.end());
  shuffled.push_back("agent-5");
  EXPECT_EQ(assign_splits(shuffled, SplitConfig{}), a);
  SplitConfig other;
  other.seed = 7;
  EXPECT_NE(assign_splits(agent_names(100), other), a);
}

RawTrack step_onset_track() {
  return raw_track("step", {{0.0, Vec2(0, 0)},
                            {0.5, Vec2(0, 0)},
                            {1.0, Vec2(0.5, 0)},
                            {1.5, Vec2(1.0, 0)},
                            {2.0, Vec2(1.5, 0)},
                            {2.5, Vec2(2.0, 0)}});
}

TEST(AuditLeakage, AntiCausalLeadsRawOnset) {
  const RawTrack raw = step_onset_track();
  const LeakageEntry e =
      audit_leakage(raw, resample_track(raw, 10.0, ResampleMode::kAntiCausalLinear));
  ASSERT_TRUE(e.raw_onset);
  ASSERT_TRUE(e.resampled_onset);
  EXPECT_EQ(*e.raw_onset, 1'000'000);
  ASSERT_TRUE(e.lead_s);
  // Analytic lead 0.4 s, within one grid step.
  EXPECT_GE(*e.lead_s, 0.1);
  EXPECT_LE(std::abs(*e.resampled_onset - 600'000), 100'000);
}

TEST(AuditLeakage, CausalHoldNeverLeads) {
  const RawTrack raw = step_onset_track();
  const LeakageEntry e = audit_leakage(raw, resample_track(raw, 10.0, ResampleMode::kCausalHold));
  ASSERT_TRUE(e.lead_s);
  EXPECT_LE(*e.lead_s, 0.0);
}

TEST(AuditLeakage, StationaryHasNoOnset) {
  const RawTrack raw = raw_track("still", {{0.0, Vec2(1, 1)}, {0.5, Vec2(1, 1)},
                                           {1.0, Vec2(1, 1)}, {1.5, Vec2(1, 1)}});
  const LeakageEntry e =
      audit_leakage(raw, resample_track(raw, 10.0, ResampleMode::kAntiCausalLinear));
  EXPECT_FALSE(e.raw_onset);
  EXPECT_FALSE(e.resampled_onset);
  EXPECT_FALSE(e.lead_s);
}

TEST(AuditLeakage, SmoothingArtifactLeads) {
  const RawTrack raw = step_onset_track();
  const RawTrack smoothed = apply_smoothing_artifact(raw, 3);
  // The smoothed track already moves at 0.5 s, one sample before the source.
  const LeakageEntry e =
      audit_leakage(raw, resample_track(smoothed, 10.0, ResampleMode::kAntiCausalLinear));
  ASSERT_TRUE(e.lead_s);
  EXPECT_GT(*e.lead_s, 0.0);
  const LeakageEntry held =
      audit_leakage(raw, resample_track(smoothed, 10.0, ResampleMode::kCausalHold));
  ASSERT_TRUE(held.lead_s);
  EXPECT_GT(*held.lead_s, 0.0);
}

TEST(DetectOnset, RequiresSustainedSpeed) {
  // A single jump that does not persist is not an onset.
  std::vector<TimedPoint> blip;
  for (int k = 0; k < 20; ++k) blip.push_back({k * 100'000, Vec2(k == 5 ? 1.0 : 0.0, 0)});
  EXPECT_FALSE(detect_onset(blip, 100'000));
}

TEST(SummarizeLeakage, Aggregates) {
  std::vector<LeakageEntry> entries(4);
  entries[0].lead_s = 0.4;
  entries[1].lead_s = 0.2;
  entries[2].lead_s = -0.1;
  const LeakageReport r = summarize_leakage(entries);
  EXPECT_EQ(r.n_with_lead, 3u);
  EXPECT_EQ(r.n_positive, 2u);
  EXPECT_NEAR(r.mean_positive_lead_s, 0.3, 1e-12);
  EXPECT_NEAR(r.max_lead_s, 0.4, 1e-12);
}

CameraRig front_rig() {
  // World x forward, y left, z up; camera looks along world x.
  Mat3 r;
  r << 0, -1, 0,
       0, 0, -1,
       1, 0, 0;
  CameraRig rig{CameraModel(1000, 1000, 800, 450, r, Vec3::Zero(), 1600, 900), {}};
  for (int k = 0; k < 60; ++k) rig.frames.push_back({"f" + std::to_string(k), k * 83'333, {}, {}});
  return rig;
}

TEST(AttachCrops, MatchedStepsGetCrops) {
  std::vector<std::pair<double, Vec2>> samples;
  for (int k = 0; k <= 8; ++k) samples.push_back({0.5 * k, Vec2(10.0, 0.5 * k - 2.0)});
  const RawTrack raw = raw_track("ped", samples);
  const ResampledTrack track = resample_track(raw, 10.0, ResampleMode::kAntiCausalLinear);
  const ResampledTrack out =
      attach_crops(track, raw, front_rig(), ResampleMode::kAntiCausalLinear, 60'000, 2.0);
  int with_crop = 0;
  for (const ResampledStep& s : out.steps) {
    ASSERT_TRUE(s.frame_ref);
    ASSERT_TRUE(s.frame_ref->crop);
    ++with_crop;
    // Box at depth ~10 m: the unit-height box spans about 100 px.
    EXPECT_GT(s.frame_ref->crop->side, 150.0);
    EXPECT_LT(s.frame_ref->crop->side, 260.0);
  }
  EXPECT_EQ(with_crop, static_cast<int>(out.steps.size()));
}

TEST(AttachCrops, BehindCameraLeavesNoCrop) {
  const RawTrack raw = raw_track("ped", {{0.0, Vec2(-10, 0)}, {0.5, Vec2(-10, 0.5)}});
  const ResampledTrack track = resample_track(raw, 10.0, ResampleMode::kAntiCausalLinear);
  const ResampledTrack out =
      attach_crops(track, raw, front_rig(), ResampleMode::kAntiCausalLinear, 60'000, 2.0);
  for (const ResampledStep& s : out.steps) {
    ASSERT_TRUE(s.frame_ref);
    EXPECT_FALSE(s.frame_ref->crop);
  }
}

TEST(BuildDataset, SplitsFollowAgents) {
  std::vector<RawTrackRecord> records;
  for (int i = 0; i < 40; ++i) {
    std::vector<std::pair<double, Vec2>> samples;
    for (int k = 0; k <= 12; ++k) samples.push_back({0.5 * k, Vec2(10.0 + 0.1 * i, 0.4 * k)});
    RawTrackRecord r;
    r.track = raw_track("agent-" + std::to_string(i % 20), samples);
    r.track.camera_view = i < 20 ? "front" : "front_left";
    if (i % 20 >= 16) r.source_split = Split::kVal;
    if (i % 2 == 0) r.rig = front_rig();
    records.push_back(std::move(r));
  }
  const BuiltDataset built = build_dataset(records, BuildConfig{});
  ASSERT_FALSE(built.full.empty());
  std::map<std::string, Split> seen;
  int test_count = 0;
  for (const PredictionInstance& x : built.full) {
    const auto [it, inserted] = seen.emplace(x.agent_id, x.split);
    EXPECT_EQ(it->second, x.split) << x.agent_id;
    test_count += x.split == Split::kTest;
  }
  EXPECT_EQ(seen.size(), 20u);
  for (int i = 16; i < 20; ++i) EXPECT_EQ(seen.at("agent-" + std::to_string(i)), Split::kTest);
  EXPECT_GT(test_count, 0);
  EXPECT_TRUE(std::is_sorted(built.full.begin(), built.full.end(),
                             [](const auto& a, const auto& b) {
                               return a.instance_id < b.instance_id;
                             }));
  // Even-indexed records carry a camera rig and so have crops.
  bool any_crop = false;
  for (const PredictionInstance& x : built.full) {
    for (const auto& c : x.crop_refs) any_crop |= c.has_value();
  }
  EXPECT_TRUE(any_crop);
}

TEST(BuildDataset, AgentInBothSourceSplitsIsAnError) {
  std::vector<RawTrackRecord> records(2);
  records[0].track = raw_track("a", {{0.0, Vec2(0, 0)}, {0.5, Vec2(1, 0)}});
  records[1].track = records[0].track;
  records[1].track.camera_view = "back";
  records[1].source_split = Split::kVal;
  EXPECT_EQ(code_of([&] { build_dataset(records, BuildConfig{}); }),
            ErrorCode::kInvalidArgument);
}

TEST(ComputeCvAde, MatchesPredictor) {
  const PredictionInstance x =
      test::instance_from("q", [](double t) { return Vec2(t * t, std::sin(t)); });
  const KinematicState s = estimate_kinematics(x.history);
  const auto means = predict_cv(s, 30, 0.1);
  double sum = 0;
  for (int k = 0; k < 30; ++k) sum += (means[k] - x.future[k].position).norm();
  EXPECT_NEAR(compute_cv_ade(x), sum / 30, 1e-12);
}

}  // namespace
}  // namespace pedbench

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

#include "pedbench/record_io.h"

#include <random>
#include <sstream>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "test_util.h"

namespace pedbench {
namespace {

using test::code_of;

std::vector<PredictionInstance> random_instances(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-100, 100);
  std::vector<PredictionInstance> out;
  for (int i = 0; i < n; ++i) {
    PredictionInstance x;
    x.instance_id = "id" + std::to_string(i);
    x.agent_id = "agent\"" + std::to_string(i % 17);
    x.camera_view = i % 2 ? "CAM_FRONT" : "CAM_BACK_LEFT";
    x.split = static_cast<Split>(i % 3);
    for (int k = 0; k < 10; ++k) {
      x.history.push_back({k * 100'000 + i, Vec2(u(rng), u(rng) * 1e-7)});
      if (k % 3 == 0) {
        x.crop_refs.push_back(CropRef{"tok" + std::to_string(k), SquareCrop{u(rng), u(rng), 1 / 3.0}});
      } else {
        x.crop_refs.push_back(std::nullopt);
      }
    }
    for (int k = 0; k < 30; ++k) x.future.push_back({(10 + k) * 100'000 + i, Vec2(u(rng), u(rng))});
    x.motion_change = i % 4 == 0;
    x.cv_ade = std::abs(u(rng)) / 7.0;
    out.push_back(std::move(x));
  }
  return out;
}

TEST(Instances, RoundTripLossless) {
  const auto instances = random_instances(1000, 1);
  std::stringstream ss;
  write_instances(ss, instances);
  const auto back = read_instances(ss);
  ASSERT_EQ(back.size(), instances.size());
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_EQ(back[i], instances[i]) << i;
  std::stringstream again;
  write_instances(again, back);
  std::stringstream first;
  write_instances(first, instances);
  EXPECT_EQ(first.str(), again.str());
}

TEST(Instances, EmptyAndBlankLines) {
  std::stringstream empty;
  EXPECT_TRUE(read_instances(empty).empty());
  std::stringstream ss;
  write_instances(ss, random_instances(2, 2));
  std::stringstream padded("\n" + ss.str() + "\n\n");
  EXPECT_EQ(read_instances(padded).size(), 2u);
}

TEST(Instances, TruncatedLineNamesLine) {
  std::stringstream ss;
  write_instances(ss, random_instances(3, 3));
  std::string text = ss.str();
  const auto second_end = text.find('\n', text.find('\n') + 1);
  text.erase(second_end - 20, 20);
  std::stringstream broken(text);
  try {
    read_instances(broken);
    FAIL() << "expected MalformedRecord";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedRecord);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(Instances, MissingFieldRejected) {
  std::stringstream ss(R"({"instance_id":"a","agent_id":"b"})");
  EXPECT_EQ(code_of([&] { read_instances(ss); }), ErrorCode::kMalformedRecord);
}

TEST(Predictions, RoundTripLossless) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<MultimodalPrediction> preds;
  for (int i = 0; i < 50; ++i) {
    MultimodalPrediction p{"id" + std::to_string(i), {}};
    for (int m = 0; m < 3; ++m) {
      ModePrediction mode;
      mode.weight = m == 0 ? 0.5 : 0.25;
      for (int k = 0; k < 30; ++k) {
        Mat2 c;
        const double off = u(rng) * 0.01;
        c << 0.1 + k * 0.01, off, off, 0.2 + k * 0.013;
        mode.steps.push_back({(k + 10) * 100'000, Vec2(u(rng), u(rng)), c});
      }
      p.modes.push_back(std::move(mode));
    }
    preds.push_back(std::move(p));
  }
  std::stringstream ss;
  write_predictions(ss, preds);
  const auto back = read_predictions(ss);
  ASSERT_EQ(back.size(), preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    EXPECT_EQ(back[i].instance_id, preds[i].instance_id);
    ASSERT_EQ(back[i].modes.size(), preds[i].modes.size());
    for (std::size_t m = 0; m < preds[i].modes.size(); ++m) {
      EXPECT_EQ(back[i].modes[m].weight, preds[i].modes[m].weight);
      for (std::size_t k = 0; k < 30; ++k) {
        EXPECT_EQ(back[i].modes[m].steps[k].t, preds[i].modes[m].steps[k].t);
        EXPECT_EQ(back[i].modes[m].steps[k].mean, preds[i].modes[m].steps[k].mean);
        EXPECT_EQ(back[i].modes[m].steps[k].covariance, preds[i].modes[m].steps[k].covariance);
      }
    }
  }
}

TEST(RawTracks, RoundTripWithRig) {
  RawTrackRecord r;
  r.track = test::raw_track("p1", {{0.0, Vec2(1, 2)}, {0.5, Vec2(1.5, 2.25)}});
  r.track.samples[1].yaw = 0.3;
  r.track.samples[1].box_size = Vec3(0.6, 0.5, 1.8);
  r.source_split = Split::kVal;
  Mat3 rot = Eigen::AngleAxisd(0.4, Vec3::UnitZ()).toRotationMatrix();
  r.rig = CameraRig{CameraModel(1266.4, 1266.4, 816.3, 491.5, rot, Vec3(1, 2, 3), 1600, 900),
                    {{"f0", 10, std::nullopt, std::nullopt}, {"f1", 20, rot, Vec3(0, 0, 1)}}};
  RawTrackRecord plain;
  plain.track = test::raw_track("p2", {{0.0, Vec2(0, 0)}, {0.5, Vec2(0, 1)}});

  std::stringstream ss;
  write_raw_tracks(ss, {r, plain});
  const auto back = read_raw_tracks(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].track.agent_id, "p1");
  EXPECT_EQ(back[0].track.samples[1].yaw, 0.3);
  EXPECT_EQ(back[0].track.samples[1].box_size, Vec3(0.6, 0.5, 1.8));
  EXPECT_EQ(back[0].source_split, Split::kVal);
  ASSERT_TRUE(back[0].rig);
  EXPECT_EQ(back[0].rig->camera.rotation(), rot);
  EXPECT_EQ(back[0].rig->camera.fx(), 1266.4);
  ASSERT_EQ(back[0].rig->frames.size(), 2u);
  EXPECT_FALSE(back[0].rig->frames[0].rotation);
  EXPECT_EQ(*back[0].rig->frames[1].translation, Vec3(0, 0, 1));
  EXPECT_FALSE(back[1].rig);
  EXPECT_FALSE(back[1].source_split);
}

}  // namespace
}  // namespace pedbench

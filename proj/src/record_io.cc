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

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"

#include "pedbench/error.h"

namespace pedbench {
namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

ordered_json points_to_json(const std::vector<TimedPoint>& points) {
  ordered_json out = ordered_json::array();
  for (const TimedPoint& p : points) {
    out.push_back({p.t, p.position.x(), p.position.y()});
  }
  return out;
}

std::vector<TimedPoint> points_from_json(const json& j) {
  std::vector<TimedPoint> out;
  for (const json& p : j) {
    if (!p.is_array() || p.size() != 3) {
      throw std::invalid_argument("trajectory point must be [t_us, x, y]");
    }
    out.push_back({p[0].get<TimestampUs>(), Vec2(p[1].get<double>(), p[2].get<double>())});
  }
  return out;
}

std::vector<double> numbers(const json& j, std::size_t expected, const char* what) {
  if (!j.is_array() || j.size() != expected) {
    throw std::invalid_argument(std::string(what) + " must have " +
                                std::to_string(expected) + " numbers");
  }
  std::vector<double> out;
  for (const json& x : j) out.push_back(x.get<double>());
  return out;
}

Mat3 matrix_from_json(const json& j) {
  const auto v = numbers(j, 9, "rotation");
  Mat3 m;
  m << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
  return m;
}

ordered_json matrix_to_json(const Mat3& m) {
  ordered_json out = ordered_json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out.push_back(m(r, c));
  return out;
}

Vec3 vector_from_json(const json& j, const char* what) {
  const auto v = numbers(j, 3, what);
  return {v[0], v[1], v[2]};
}

ordered_json instance_to_json(const PredictionInstance& instance) {
  ordered_json crops = ordered_json::array();
  for (const auto& crop : instance.crop_refs) {
    if (!crop) {
      crops.push_back(nullptr);
      continue;
    }
    crops.push_back({{"frame_token", crop->frame_token},
                     {"center_u", crop->crop.center_u},
                     {"center_v", crop->crop.center_v},
                     {"side", crop->crop.side}});
  }
  ordered_json j;
  j["instance_id"] = instance.instance_id;
  j["agent_id"] = instance.agent_id;
  j["camera_view"] = instance.camera_view;
  j["split"] = to_string(instance.split);
  j["motion_change"] = instance.motion_change;
  j["cv_ade"] = instance.cv_ade;
  j["history"] = points_to_json(instance.history);
  j["future"] = points_to_json(instance.future);
  j["crop_refs"] = std::move(crops);
  return j;
}

PredictionInstance instance_from_json(const json& j) {
  PredictionInstance instance;
  instance.instance_id = j.at("instance_id").get<std::string>();
  instance.agent_id = j.at("agent_id").get<std::string>();
  instance.camera_view = j.at("camera_view").get<std::string>();
  instance.split = parse_split(j.at("split").get<std::string>());
  instance.motion_change = j.at("motion_change").get<bool>();
  instance.cv_ade = j.at("cv_ade").get<double>();
  instance.history = points_from_json(j.at("history"));
  instance.future = points_from_json(j.at("future"));
  for (const json& c : j.at("crop_refs")) {
    if (c.is_null()) {
      instance.crop_refs.emplace_back();
      continue;
    }
    instance.crop_refs.push_back(CropRef{
        c.at("frame_token").get<std::string>(),
        SquareCrop{c.at("center_u").get<double>(), c.at("center_v").get<double>(),
                   c.at("side").get<double>()}});
  }
  if (instance.crop_refs.size() != instance.history.size()) {
    throw std::invalid_argument("crop_refs must have one entry per history step");
  }
  return instance;
}

ordered_json prediction_to_json(const MultimodalPrediction& prediction) {
  ordered_json modes = ordered_json::array();
  for (const ModePrediction& mode : prediction.modes) {
    ordered_json steps = ordered_json::array();
    for (const ModeStep& s : mode.steps) {
      steps.push_back({s.t, s.mean.x(), s.mean.y(), s.covariance(0, 0),
                       s.covariance(0, 1), s.covariance(1, 1)});
    }
    ordered_json m;
    m["weight"] = mode.weight;
    m["steps"] = std::move(steps);
    modes.push_back(std::move(m));
  }
  ordered_json j;
  j["instance_id"] = prediction.instance_id;
  j["modes"] = std::move(modes);
  return j;
}

MultimodalPrediction prediction_from_json(const json& j) {
  MultimodalPrediction prediction;
  prediction.instance_id = j.at("instance_id").get<std::string>();
  for (const json& m : j.at("modes")) {
    ModePrediction mode;
    mode.weight = m.at("weight").get<double>();
    for (const json& s : m.at("steps")) {
      if (!s.is_array() || s.size() != 6) {
        throw std::invalid_argument("prediction step must be [t_us, x, y, sxx, sxy, syy]");
      }
      ModeStep step;
      step.t = s[0].get<TimestampUs>();
      step.mean = Vec2(s[1].get<double>(), s[2].get<double>());
      const double sxy = s[4].get<double>();
      step.covariance << s[3].get<double>(), sxy, sxy, s[5].get<double>();
      mode.steps.push_back(step);
    }
    prediction.modes.push_back(std::move(mode));
  }
  return prediction;
}

ordered_json raw_track_to_json(const RawTrackRecord& record) {
  ordered_json samples = ordered_json::array();
  for (const RawSample& s : record.track.samples) {
    samples.push_back({s.t, s.position.x(), s.position.y(), s.position.z(),
                       s.box_size.x(), s.box_size.y(), s.box_size.z(), s.yaw});
  }
  ordered_json j;
  j["agent_id"] = record.track.agent_id;
  j["camera_view"] = record.track.camera_view;
  if (record.source_split) j["source_split"] = to_string(*record.source_split);
  j["samples"] = std::move(samples);
  if (record.rig) {
    const CameraModel& c = record.rig->camera;
    j["camera"] = {{"fx", c.fx()},
                   {"fy", c.fy()},
                   {"cx", c.cx()},
                   {"cy", c.cy()},
                   {"width", c.image_width()},
                   {"height", c.image_height()},
                   {"rotation", matrix_to_json(c.rotation())},
                   {"translation", {c.translation().x(), c.translation().y(),
                                    c.translation().z()}}};
    ordered_json frames = ordered_json::array();
    for (const CameraFrame& f : record.rig->frames) {
      ordered_json fj;
      fj["token"] = f.token;
      fj["t_us"] = f.t;
      if (f.rotation) fj["rotation"] = matrix_to_json(*f.rotation);
      if (f.translation) {
        fj["translation"] = {f.translation->x(), f.translation->y(), f.translation->z()};
      }
      frames.push_back(std::move(fj));
    }
    j["frames"] = std::move(frames);
  }
  return j;
}

RawTrackRecord raw_track_from_json(const json& j) {
  RawTrackRecord record;
  record.track.agent_id = j.at("agent_id").get<std::string>();
  record.track.camera_view = j.at("camera_view").get<std::string>();
  if (j.contains("source_split")) {
    record.source_split = parse_split(j.at("source_split").get<std::string>());
  }
  for (const json& s : j.at("samples")) {
    const auto v = numbers(s, 8, "raw sample");
    RawSample sample;
    sample.t = s[0].get<TimestampUs>();
    sample.position = Vec3(v[1], v[2], v[3]);
    sample.box_size = Vec3(v[4], v[5], v[6]);
    sample.yaw = v[7];
    record.track.samples.push_back(sample);
  }
  if (j.contains("camera")) {
    const json& c = j.at("camera");
    CameraModel camera(c.at("fx").get<double>(), c.at("fy").get<double>(),
                       c.at("cx").get<double>(), c.at("cy").get<double>(),
                       matrix_from_json(c.at("rotation")),
                       vector_from_json(c.at("translation"), "translation"),
                       c.at("width").get<int>(), c.at("height").get<int>());
    CameraRig rig{std::move(camera), {}};
    if (j.contains("frames")) {
      for (const json& f : j.at("frames")) {
        CameraFrame frame;
        frame.token = f.at("token").get<std::string>();
        frame.t = f.at("t_us").get<TimestampUs>();
        if (f.contains("rotation")) frame.rotation = matrix_from_json(f.at("rotation"));
        if (f.contains("translation")) {
          frame.translation = vector_from_json(f.at("translation"), "translation");
        }
        rig.frames.push_back(std::move(frame));
      }
    }
    record.rig = std::move(rig);
  }
  return record;
}

template <class T, class Fn>
std::vector<T> read_lines(std::istream& in, Fn&& parse_record) {
  std::vector<T> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_record(json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kMalformedRecord,
                  "line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return in;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace

void write_instances(std::ostream& out, const std::vector<PredictionInstance>& instances) {
  for (const auto& instance : instances) out << instance_to_json(instance).dump() << '\n';
}

std::vector<PredictionInstance> read_instances(std::istream& in) {
  return read_lines<PredictionInstance>(in, instance_from_json);
}

void write_instances(const std::filesystem::path& path,
                     const std::vector<PredictionInstance>& instances) {
  auto out = open_for_write(path);
  write_instances(out, instances);
  finish(out, path);
}

std::vector<PredictionInstance> read_instances(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return read_instances(in);
}

void write_predictions(std::ostream& out,
                       const std::vector<MultimodalPrediction>& predictions) {
  for (const auto& p : predictions) out << prediction_to_json(p).dump() << '\n';
}

std::vector<MultimodalPrediction> read_predictions(std::istream& in) {
  return read_lines<MultimodalPrediction>(in, prediction_from_json);
}

void write_predictions(const std::filesystem::path& path,
                       const std::vector<MultimodalPrediction>& predictions) {
  auto out = open_for_write(path);
  write_predictions(out, predictions);
  finish(out, path);
}

std::vector<MultimodalPrediction> read_predictions(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return read_predictions(in);
}

void write_raw_tracks(std::ostream& out, const std::vector<RawTrackRecord>& tracks) {
  for (const auto& t : tracks) out << raw_track_to_json(t).dump() << '\n';
}

std::vector<RawTrackRecord> read_raw_tracks(std::istream& in) {
  return read_lines<RawTrackRecord>(in, raw_track_from_json);
}

void write_raw_tracks(const std::filesystem::path& path,
                      const std::vector<RawTrackRecord>& tracks) {
  auto out = open_for_write(path);
  write_raw_tracks(out, tracks);
  finish(out, path);
}

std::vector<RawTrackRecord> read_raw_tracks(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return read_raw_tracks(in);
}

}  // namespace pedbench

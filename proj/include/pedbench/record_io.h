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

#ifndef PEDBENCH_RECORD_IO_H_
#define PEDBENCH_RECORD_IO_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pedbench/dataset_builder.h"
#include "pedbench/instance.h"
#include "pedbench/predictors.h"

// Line-delimited JSON files, one record per line. Numbers are written as the
// shortest decimal that round-trips, timestamps as integer microseconds.
// Blank lines are skipped on read; anything else that does not parse throws
// MalformedRecord naming the 1-based line.
//
// instances:   {instance_id, agent_id, camera_view, split, motion_change,
//               cv_ade, history: [[t_us, x, y]...], future: [...],
//               crop_refs: [null | {frame_token, center_u, center_v, side}]}
// predictions: {instance_id, modes: [{weight, steps: [[t_us, x, y, sxx, sxy,
//               syy]...]}]}
// raw tracks:  {agent_id, camera_view, source_split?, samples: [[t_us, x, y,
//               z, length, width, height, yaw]...], camera?: {fx, fy, cx, cy,
//               width, height, rotation: [9, row-major], translation: [3]},
//               frames?: [{token, t_us, rotation?, translation?}]}

namespace pedbench {

void write_instances(std::ostream& out, const std::vector<PredictionInstance>& instances);
std::vector<PredictionInstance> read_instances(std::istream& in);
void write_instances(const std::filesystem::path& path,
                     const std::vector<PredictionInstance>& instances);
std::vector<PredictionInstance> read_instances(const std::filesystem::path& path);

void write_predictions(std::ostream& out,
                       const std::vector<MultimodalPrediction>& predictions);
std::vector<MultimodalPrediction> read_predictions(std::istream& in);
void write_predictions(const std::filesystem::path& path,
                       const std::vector<MultimodalPrediction>& predictions);
std::vector<MultimodalPrediction> read_predictions(const std::filesystem::path& path);

void write_raw_tracks(std::ostream& out, const std::vector<RawTrackRecord>& tracks);
std::vector<RawTrackRecord> read_raw_tracks(std::istream& in);
void write_raw_tracks(const std::filesystem::path& path,
                      const std::vector<RawTrackRecord>& tracks);
std::vector<RawTrackRecord> read_raw_tracks(const std::filesystem::path& path);

}  // namespace pedbench

#endif  // PEDBENCH_RECORD_IO_H_

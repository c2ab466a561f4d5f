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

#ifndef PEDBENCH_INSTANCE_H_
#define PEDBENCH_INSTANCE_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pedbench/camera_geometry.h"
#include "pedbench/types.h"

namespace pedbench {

enum class Split { kTrain, kVal, kTest };

std::string_view to_string(Split split);
Split parse_split(std::string_view name);

struct CropRef {
  std::string frame_token;
  SquareCrop crop;

  bool operator==(const CropRef&) const = default;
};

// A 1 s history / 3 s future window cut from one resampled track.
struct PredictionInstance {
  std::string instance_id;
  std::string agent_id;
  std::string camera_view;
  Split split = Split::kTrain;
  std::vector<TimedPoint> history;
  std::vector<TimedPoint> future;
  std::vector<std::optional<CropRef>> crop_refs;  // one per history step
  bool motion_change = false;
  double cv_ade = 0.0;  // m
};

bool operator==(const TimedPoint& a, const TimedPoint& b);
bool operator==(const PredictionInstance& a, const PredictionInstance& b);

}  // namespace pedbench

#endif  // PEDBENCH_INSTANCE_H_

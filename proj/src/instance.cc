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

#include "pedbench/instance.h"

#include <string>

#include "pedbench/error.h"

namespace pedbench {

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "unknown";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw Error(ErrorCode::kInvalidArgument, "unknown split '" + std::string(name) + "'");
}

bool operator==(const TimedPoint& a, const TimedPoint& b) {
  return a.t == b.t && a.position == b.position;
}

bool operator==(const PredictionInstance& a, const PredictionInstance& b) {
  return a.instance_id == b.instance_id && a.agent_id == b.agent_id &&
         a.camera_view == b.camera_view && a.split == b.split &&
         a.history == b.history && a.future == b.future &&
         a.crop_refs == b.crop_refs && a.motion_change == b.motion_change &&
         a.cv_ade == b.cv_ade;
}

}  // namespace pedbench

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

#ifndef PEDBENCH_TYPES_H_
#define PEDBENCH_TYPES_H_

#include <cstdint>

#include <Eigen/Core>

namespace pedbench {

using TimestampUs = std::int64_t;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

inline constexpr TimestampUs kMicrosPerSecond = 1'000'000;

inline double to_seconds(TimestampUs us) {
  return static_cast<double>(us) / static_cast<double>(kMicrosPerSecond);
}

// Grid period of a sampling rate. Throws InvalidArgument unless the period is
// a whole number of microseconds.
TimestampUs period_us(double rate_hz);

// Number of grid steps covering `seconds` at `rate_hz`. Throws
// InvalidArgument unless the duration is a positive multiple of the period.
int steps_for_duration(double seconds, double rate_hz);

struct TimedPoint {
  TimestampUs t = 0;
  Vec2 position = Vec2::Zero();
};

}  // namespace pedbench

#endif  // PEDBENCH_TYPES_H_

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

#include "pedbench/error.h"

#include <cmath>
#include <string>

#include "pedbench/types.h"

namespace pedbench {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kNonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case ErrorCode::kBehindCamera: return "BehindCamera";
    case ErrorCode::kFullyBehindCamera: return "FullyBehindCamera";
    case ErrorCode::kDegenerateBox: return "DegenerateBox";
    case ErrorCode::kInsufficientRemainder: return "InsufficientRemainder";
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kTooFewInstances: return "TooFewInstances";
    case ErrorCode::kHorizonExceedsFuture: return "HorizonExceedsFuture";
    case ErrorCode::kSingularCovariance: return "SingularCovariance";
    case ErrorCode::kInvalidScript: return "InvalidScript";
    case ErrorCode::kInvalidPredictions: return "InvalidPredictions";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

TimestampUs period_us(double rate_hz) {
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) {
    throw Error(ErrorCode::kInvalidArgument, "rate must be positive");
  }
  const double period = static_cast<double>(kMicrosPerSecond) / rate_hz;
  const double rounded = std::round(period);
  if (rounded < 1.0 || std::abs(period - rounded) > 1e-6) {
    throw Error(ErrorCode::kInvalidArgument,
                "rate " + std::to_string(rate_hz) +
                    " Hz does not give a whole-microsecond period");
  }
  return static_cast<TimestampUs>(rounded);
}

int steps_for_duration(double seconds, double rate_hz) {
  const double steps = seconds * rate_hz;
  const double rounded = std::round(steps);
  if (!(seconds > 0.0) || rounded < 1.0 || std::abs(steps - rounded) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "duration " + std::to_string(seconds) +
                    " s is not a positive multiple of the grid period");
  }
  return static_cast<int>(rounded);
}

}  // namespace pedbench

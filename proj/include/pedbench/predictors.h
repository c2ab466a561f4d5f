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

#ifndef PEDBENCH_PREDICTORS_H_
#define PEDBENCH_PREDICTORS_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pedbench/instance.h"
#include "pedbench/trajectory_model.h"
#include "pedbench/types.h"

namespace pedbench {

struct DAParams {
  double lambda = 5.5;  // 1/s
};

// Behaviour hypotheses produced by the kinematic ensemble, in mode order.
enum class ModeKind {
  kStationary = 0,
  kConstantVelocity = 1,
  kDecayingAcceleration = 2,
  kWalkInitiation = 3,
  kStopping = 4,
};
inline constexpr int kNumModeKinds = 5;

std::string_view to_string(ModeKind kind);

struct ModeStep {
  TimestampUs t = 0;
  Vec2 mean = Vec2::Zero();
  Mat2 covariance = Mat2::Identity();
};

struct ModePrediction {
  double weight = 1.0;
  std::vector<ModeStep> steps;
};

struct MultimodalPrediction {
  std::string instance_id;
  std::vector<ModePrediction> modes;
};

// Mean trajectory of one mode before covariances are attached.
struct ModeTrack {
  ModeKind kind = ModeKind::kConstantVelocity;
  double weight = 1.0;
  std::vector<Vec2> means;
};

// Isotropic variance (m^2) per future step, index 0 = first future step.
using CovarianceSchedule = std::vector<double>;

struct CovarianceSchedules {
  std::array<CovarianceSchedule, kNumModeKinds> per_kind;

  const CovarianceSchedule& operator[](ModeKind kind) const {
    return per_kind[static_cast<int>(kind)];
  }
  CovarianceSchedule& operator[](ModeKind kind) {
    return per_kind[static_cast<int>(kind)];
  }
};

inline constexpr double kVarianceFloor = 0.01;  // m^2

// Uncalibrated schedule: standard deviation 0.1 m + 0.3 m/s * t.
CovarianceSchedule default_schedule(int horizon_steps, double dt);
CovarianceSchedules default_schedules(int horizon_steps, double dt);

enum class CovarianceSource { kCalibrated, kDefault };

struct EnsembleConfig {
  double speed_gate = 0.25;  // m/s
  double walk_speed = 1.4;   // m/s
  double stop_decel = 2.0;   // m/s^2
  // Weights in ModeKind order.
  std::array<double, kNumModeKinds> slow_weights{0.55, 0.10, 0.10, 0.20, 0.05};
  std::array<double, kNumModeKinds> moving_weights{0.05, 0.40, 0.25, 0.10, 0.20};
  CovarianceSource covariance = CovarianceSource::kCalibrated;
  bool tune_weights = false;

  // Throws InvalidArgument unless parameters are positive and each weight
  // table is non-negative and sums to 1 within 1e-9.
  void validate() const;
};

// mean(t) = position + velocity * t for t = k * dt, k = 1..horizon_steps.
std::vector<Vec2> predict_cv(const KinematicState& state, int horizon_steps,
                             double dt);

// Double integral of a(t) = a0 exp(-lambda t):
// mean(t) = position + v0 t + (a0 / lambda) t - (a0 / lambda^2)(1 - exp(-lambda t)).
std::vector<Vec2> predict_da(const KinematicState& state, const DAParams& params,
                             int horizon_steps, double dt);

// Single mode with weight 1 and covariances diag(schedule[k]).
MultimodalPrediction wrap_unimodal(std::span<const Vec2> trajectory,
                                   std::span<const TimestampUs> times,
                                   const CovarianceSchedule& schedule);

// The five ensemble hypotheses with regime weights. Walk initiation follows
// the heading, else the fallback direction; with neither it is dropped and
// its weight moves to the stationary mode.
std::vector<ModeTrack> ensemble_modes(const KinematicState& state,
                                      const EnsembleConfig& config,
                                      const DAParams& da, int horizon_steps,
                                      double dt);

// `times` are evenly spaced and start one period after state.t.
MultimodalPrediction predict_ensemble(const KinematicState& state,
                                      const EnsembleConfig& config,
                                      const DAParams& da,
                                      const CovarianceSchedules& schedules,
                                      std::span<const TimestampUs> times);

// Attaches isotropic covariances by mode kind.
MultimodalPrediction attach_covariances(std::span<const ModeTrack> modes,
                                        std::span<const TimestampUs> times,
                                        const CovarianceSchedules& schedules);

enum class PredictorKind { kCv, kDa, kEnsemble };

std::string_view to_string(PredictorKind kind);
PredictorKind parse_predictor_kind(std::string_view name);

struct PredictorConfig {
  DAParams da;
  KinematicsOptions kinematics;
  EnsembleConfig ensemble;
};

// Stateless once constructed; calibration returns a new instance.
class KinematicPredictor {
 public:
  KinematicPredictor(PredictorKind kind, PredictorConfig config,
                     CovarianceSchedules schedules);

  PredictorKind kind() const { return kind_; }
  std::string_view name() const { return to_string(kind_); }
  bool unimodal() const { return kind_ != PredictorKind::kEnsemble; }
  const PredictorConfig& config() const { return config_; }
  const CovarianceSchedules& schedules() const { return schedules_; }

  std::vector<ModeTrack> propose(const PredictionInstance& instance) const;
  MultimodalPrediction predict(const PredictionInstance& instance) const;

  KinematicPredictor with_schedules(CovarianceSchedules schedules) const;
  KinematicPredictor with_config(PredictorConfig config) const;

 private:
  PredictorKind kind_;
  PredictorConfig config_;
  CovarianceSchedules schedules_;
};

// Future timestamps of an instance (predictors never read future positions).
std::vector<TimestampUs> future_times(const PredictionInstance& instance);

struct CalibrationResult {
  CovarianceSchedules schedules;
  // Per kind: how many instances had that mode as their closest mode.
  std::array<int, kNumModeKinds> closest_counts{};
};

// Per mode kind and future step: mean squared per-axis residual over the
// instances where that mode was closest (by ADE over the whole future),
// floored at kVarianceFloor and made non-decreasing by a running max. A kind
// that is proposed but never closest uses its residuals over all instances;
// a kind never proposed keeps the predictor's current schedule. Throws TooFewInstances below 50.
CalibrationResult calibrate_covariance(
    std::span<const PredictionInstance> instances,
    const KinematicPredictor& predictor);

inline constexpr int kMinCalibrationInstances = 50;

// Grid search over regime weight tables (step 0.05, every weight >= 0.05)
// minimising mean NLL over `horizon_steps` on the given instances. Slow and
// moving regimes are tuned independently.
EnsembleConfig tune_ensemble_weights(
    std::span<const PredictionInstance> instances,
    const KinematicPredictor& predictor, std::span<const int> horizon_steps);

}  // namespace pedbench

#endif  // PEDBENCH_PREDICTORS_H_

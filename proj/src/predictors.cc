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

#include "pedbench/predictors.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pedbench/error.h"
#include "pedbench/metrics.h"

namespace pedbench {
namespace {

void check_horizon(int horizon_steps, double dt) {
  if (horizon_steps < 0 || !(dt > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid prediction horizon");
  }
}

void validate_table(const std::array<double, kNumModeKinds>& table,
                    const char* name) {
  double sum = 0.0;
  for (const double w : table) {
    if (!(w >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(name) + " has a negative weight");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(name) + " does not sum to 1");
  }
}

// Distance covered by a speed that relaxes from `v0` towards `v_target` as
// v_target + (v0 - v_target) exp(-lambda t).
double relaxed_distance(double v0, double v_target, double lambda, double t) {
  return v0 * t + (v_target - v0) * (t - (1.0 - std::exp(-lambda * t)) / lambda);
}

double mode_ade(const std::vector<Vec2>& means,
                const std::vector<TimedPoint>& future) {
  double sum = 0.0;
  for (std::size_t k = 0; k < future.size(); ++k) {
    sum += (means[k] - future[k].position).norm();
  }
  return sum / static_cast<double>(future.size());
}

double dt_of(const PredictionInstance& instance) {
  if (instance.history.size() < 2) {
    throw Error(ErrorCode::kTooFewSamples,
                "instance " + instance.instance_id + " has a short history");
  }
  const auto& h = instance.history;
  return to_seconds(h[h.size() - 1].t - h[h.size() - 2].t);
}

}  // namespace

std::string_view to_string(ModeKind kind) {
  switch (kind) {
    case ModeKind::kStationary: return "stationary";
    case ModeKind::kConstantVelocity: return "cv";
    case ModeKind::kDecayingAcceleration: return "da";
    case ModeKind::kWalkInitiation: return "walk_initiation";
    case ModeKind::kStopping: return "stopping";
  }
  return "unknown";
}

CovarianceSchedule default_schedule(int horizon_steps, double dt) {
  CovarianceSchedule schedule(static_cast<std::size_t>(horizon_steps));
  for (int k = 0; k < horizon_steps; ++k) {
    const double sigma = 0.1 + 0.3 * (k + 1) * dt;
    schedule[static_cast<std::size_t>(k)] = std::max(kVarianceFloor, sigma * sigma);
  }
  return schedule;
}

CovarianceSchedules default_schedules(int horizon_steps, double dt) {
  CovarianceSchedules out;
  for (auto& s : out.per_kind) s = default_schedule(horizon_steps, dt);
  return out;
}

void EnsembleConfig::validate() const {
  if (!(speed_gate >= 0.0) || !(walk_speed > 0.0) || !(stop_decel > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "ensemble speeds and deceleration must be positive");
  }
  validate_table(slow_weights, "slow regime weight table");
  validate_table(moving_weights, "moving regime weight table");
}

std::vector<Vec2> predict_cv(const KinematicState& state, int horizon_steps,
                             double dt) {
  check_horizon(horizon_steps, dt);
  std::vector<Vec2> means;
  means.reserve(static_cast<std::size_t>(horizon_steps));
  for (int k = 1; k <= horizon_steps; ++k) {
    means.push_back(state.position + state.velocity * (k * dt));
  }
  return means;
}

std::vector<Vec2> predict_da(const KinematicState& state, const DAParams& params,
                             int horizon_steps, double dt) {
  check_horizon(horizon_steps, dt);
  if (!(params.lambda > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "decay rate must be positive");
  }
  const double lambda = params.lambda;
  const Vec2 a_over_lambda = state.acceleration / lambda;
  std::vector<Vec2> means;
  means.reserve(static_cast<std::size_t>(horizon_steps));
  for (int k = 1; k <= horizon_steps; ++k) {
    const double t = k * dt;
    means.push_back(state.position + state.velocity * t + a_over_lambda * t -
                    a_over_lambda / lambda * (-std::expm1(-lambda * t)));
  }
  return means;
}

MultimodalPrediction attach_covariances(std::span<const ModeTrack> modes,
                                        std::span<const TimestampUs> times,
                                        const CovarianceSchedules& schedules) {
  MultimodalPrediction out;
  out.modes.reserve(modes.size());
  for (const ModeTrack& mode : modes) {
    const CovarianceSchedule& schedule = schedules[mode.kind];
    if (mode.means.size() != times.size() || schedule.size() < times.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "mode length does not match timestamps or schedule");
    }
    ModePrediction m;
    m.weight = mode.weight;
    m.steps.reserve(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
      m.steps.push_back({times[k], mode.means[k], schedule[k] * Mat2::Identity()});
    }
    out.modes.push_back(std::move(m));
  }
  return out;
}

MultimodalPrediction wrap_unimodal(std::span<const Vec2> trajectory,
                                   std::span<const TimestampUs> times,
                                   const CovarianceSchedule& schedule) {
  CovarianceSchedules schedules;
  schedules[ModeKind::kConstantVelocity] = schedule;
  const ModeTrack mode{ModeKind::kConstantVelocity, 1.0,
                       {trajectory.begin(), trajectory.end()}};
  return attach_covariances({&mode, 1}, times, schedules);
}

std::vector<ModeTrack> ensemble_modes(const KinematicState& state,
                                      const EnsembleConfig& config,
                                      const DAParams& da, int horizon_steps,
                                      double dt) {
  check_horizon(horizon_steps, dt);
  const auto& weights =
      state.speed < config.speed_gate ? config.slow_weights : config.moving_weights;
  const auto n = static_cast<std::size_t>(horizon_steps);

  std::vector<ModeTrack> modes;
  modes.push_back({ModeKind::kStationary, weights[0],
                   std::vector<Vec2>(n, state.position)});
  modes.push_back({ModeKind::kConstantVelocity, weights[1],
                   predict_cv(state, horizon_steps, dt)});
  modes.push_back({ModeKind::kDecayingAcceleration, weights[2],
                   predict_da(state, da, horizon_steps, dt)});

  std::optional<Vec2> direction;
  if (state.heading) {
    direction = Vec2(std::cos(*state.heading), std::sin(*state.heading));
  } else if (state.fallback_direction) {
    direction = state.fallback_direction;
  }
  if (direction) {
    ModeTrack walk{ModeKind::kWalkInitiation, weights[3], {}};
    walk.means.reserve(n);
    for (int k = 1; k <= horizon_steps; ++k) {
      const double s = relaxed_distance(state.speed, config.walk_speed, da.lambda, k * dt);
      walk.means.push_back(state.position + s * *direction);
    }
    modes.push_back(std::move(walk));
  } else {
    modes[0].weight += weights[3];
  }

  ModeTrack stop{ModeKind::kStopping, weights[4], {}};
  stop.means.reserve(n);
  const Vec2 unit = state.speed > 0.0 ? Vec2(state.velocity / state.speed) : Vec2::Zero();
  const double t_stop = state.speed / config.stop_decel;
  for (int k = 1; k <= horizon_steps; ++k) {
    const double t = std::min(k * dt, t_stop);
    const double s = state.speed * t - 0.5 * config.stop_decel * t * t;
    stop.means.push_back(state.position + s * unit);
  }
  modes.push_back(std::move(stop));
  return modes;
}

MultimodalPrediction predict_ensemble(const KinematicState& state,
                                      const EnsembleConfig& config,
                                      const DAParams& da,
                                      const CovarianceSchedules& schedules,
                                      std::span<const TimestampUs> times) {
  if (times.empty() || times.front() <= state.t) {
    throw Error(ErrorCode::kInvalidArgument,
                "prediction times must follow the state time");
  }
  const double dt = to_seconds(times.front() - state.t);
  const auto modes =
      ensemble_modes(state, config, da, static_cast<int>(times.size()), dt);
  return attach_covariances(modes, times, schedules);
}

std::string_view to_string(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::kCv: return "cv";
    case PredictorKind::kDa: return "da";
    case PredictorKind::kEnsemble: return "ensemble";
  }
  return "unknown";
}

PredictorKind parse_predictor_kind(std::string_view name) {
  if (name == "cv") return PredictorKind::kCv;
  if (name == "da") return PredictorKind::kDa;
  if (name == "ensemble") return PredictorKind::kEnsemble;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown predictor '" + std::string(name) + "'");
}

std::vector<TimestampUs> future_times(const PredictionInstance& instance) {
  std::vector<TimestampUs> times;
  times.reserve(instance.future.size());
  for (const TimedPoint& p : instance.future) times.push_back(p.t);
  return times;
}

KinematicPredictor::KinematicPredictor(PredictorKind kind, PredictorConfig config,
                                       CovarianceSchedules schedules)
    : kind_(kind), config_(std::move(config)), schedules_(std::move(schedules)) {
  if (!(config_.da.lambda > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "decay rate must be positive");
  }
  config_.ensemble.validate();
}

std::vector<ModeTrack> KinematicPredictor::propose(
    const PredictionInstance& instance) const {
  const KinematicState state =
      estimate_kinematics(instance.history, config_.kinematics);
  const int horizon = static_cast<int>(instance.future.size());
  const double dt = dt_of(instance);
  switch (kind_) {
    case PredictorKind::kCv:
      return {{ModeKind::kConstantVelocity, 1.0, predict_cv(state, horizon, dt)}};
    case PredictorKind::kDa:
      return {{ModeKind::kDecayingAcceleration, 1.0,
               predict_da(state, config_.da, horizon, dt)}};
    case PredictorKind::kEnsemble:
      return ensemble_modes(state, config_.ensemble, config_.da, horizon, dt);
  }
  return {};
}

MultimodalPrediction KinematicPredictor::predict(
    const PredictionInstance& instance) const {
  const auto times = future_times(instance);
  MultimodalPrediction out = attach_covariances(propose(instance), times, schedules_);
  out.instance_id = instance.instance_id;
  return out;
}

KinematicPredictor KinematicPredictor::with_schedules(
    CovarianceSchedules schedules) const {
  return KinematicPredictor(kind_, config_, std::move(schedules));
}

KinematicPredictor KinematicPredictor::with_config(PredictorConfig config) const {
  return KinematicPredictor(kind_, std::move(config), schedules_);
}

CalibrationResult calibrate_covariance(
    std::span<const PredictionInstance> instances,
    const KinematicPredictor& predictor) {
  if (instances.size() < static_cast<std::size_t>(kMinCalibrationInstances)) {
    throw Error(ErrorCode::kTooFewInstances,
                "covariance calibration needs at least " +
                    std::to_string(kMinCalibrationInstances) +
                    " instances, got " + std::to_string(instances.size()));
  }
  const std::size_t horizon = instances.front().future.size();

  struct Accumulator {
    std::vector<double> sum;
    int count = 0;
  };
  std::array<Accumulator, kNumModeKinds> closest, pooled;
  for (int i = 0; i < kNumModeKinds; ++i) {
    closest[i].sum.assign(horizon, 0.0);
    pooled[i].sum.assign(horizon, 0.0);
  }
  auto add = [horizon](Accumulator& acc, const ModeTrack& mode,
                       const PredictionInstance& instance) {
    for (std::size_t k = 0; k < horizon; ++k) {
      acc.sum[k] += 0.5 * (mode.means[k] - instance.future[k].position).squaredNorm();
    }
    ++acc.count;
  };

  for (const PredictionInstance& instance : instances) {
    if (instance.future.size() != horizon) {
      throw Error(ErrorCode::kInvalidArgument,
                  "calibration instances must share one future length");
    }
    const auto modes = predictor.propose(instance);
    std::size_t best = 0;
    double best_ade = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const double ade = mode_ade(modes[m].means, instance.future);
      if (ade < best_ade) {
        best_ade = ade;
        best = m;
      }
      add(pooled[static_cast<int>(modes[m].kind)], modes[m], instance);
    }
    add(closest[static_cast<int>(modes[best].kind)], modes[best], instance);
  }

  CalibrationResult result;
  result.schedules = predictor.schedules();
  for (int i = 0; i < kNumModeKinds; ++i) {
    result.closest_counts[i] = closest[i].count;
    const Accumulator& source = closest[i].count > 0 ? closest[i] : pooled[i];
    if (source.count == 0) continue;
    CovarianceSchedule schedule(horizon);
    double running = kVarianceFloor;
    for (std::size_t k = 0; k < horizon; ++k) {
      running = std::max(running, source.sum[k] / source.count);
      schedule[k] = running;
    }
    result.schedules.per_kind[i] = std::move(schedule);
  }
  return result;
}

EnsembleConfig tune_ensemble_weights(
    std::span<const PredictionInstance> instances,
    const KinematicPredictor& predictor, std::span<const int> horizon_steps) {
  if (predictor.kind() != PredictorKind::kEnsemble) {
    throw Error(ErrorCode::kInvalidArgument, "weight tuning needs the ensemble");
  }
  if (instances.empty()) {
    throw Error(ErrorCode::kTooFewInstances, "no instances to tune weights on");
  }
  const EnsembleConfig& base = predictor.config().ensemble;

  // Log-density of every mode kind at every horizon, per instance and regime.
  // Kinds missing from an instance (merged walk initiation) get -inf and
  // their weight is routed to the stationary mode, as in ensemble_modes.
  struct Row {
    std::array<std::vector<double>, kNumModeKinds> log_density;
    bool walk_merged = false;
  };
  std::array<std::vector<Row>, 2> rows;  // [slow, moving]
  for (const PredictionInstance& instance : instances) {
    const KinematicState state =
        estimate_kinematics(instance.history, predictor.config().kinematics);
    const MultimodalPrediction prediction = predictor.predict(instance);
    const auto modes = predictor.propose(instance);
    Row row;
    for (auto& d : row.log_density) {
      d.assign(horizon_steps.size(), -std::numeric_limits<double>::infinity());
    }
    row.walk_merged = modes.size() < static_cast<std::size_t>(kNumModeKinds);
    for (std::size_t m = 0; m < modes.size(); ++m) {
      for (std::size_t h = 0; h < horizon_steps.size(); ++h) {
        const auto k = static_cast<std::size_t>(horizon_steps[h]) - 1;
        if (k >= instance.future.size()) {
          throw Error(ErrorCode::kHorizonExceedsFuture, "tuning horizon too long");
        }
        const ModeStep& step = prediction.modes[m].steps[k];
        row.log_density[static_cast<int>(modes[m].kind)][h] =
            gaussian_log_density(instance.future[k].position, step.mean,
                                 step.covariance);
      }
    }
    rows[state.speed < base.speed_gate ? 0 : 1].push_back(std::move(row));
  }

  // Candidate tables: multiples of 0.05, each weight >= 0.05.
  std::vector<std::array<double, kNumModeKinds>> candidates;
  constexpr int kUnits = 20;
  for (int a = 1; a <= kUnits; ++a)
    for (int b = 1; a + b <= kUnits; ++b)
      for (int c = 1; a + b + c <= kUnits; ++c)
        for (int d = 1; a + b + c + d < kUnits; ++d) {
          const int e = kUnits - a - b - c - d;
          candidates.push_back({a / 20.0, b / 20.0, c / 20.0, d / 20.0, e / 20.0});
        }

  auto score = [&](const std::vector<Row>& regime,
                   const std::array<double, kNumModeKinds>& w) {
    double total = 0.0;
    for (const Row& row : regime) {
      for (std::size_t h = 0; h < horizon_steps.size(); ++h) {
        std::array<double, kNumModeKinds> terms;
        double peak = -std::numeric_limits<double>::infinity();
        for (int m = 0; m < kNumModeKinds; ++m) {
          double weight = w[m];
          if (row.walk_merged) {
            if (m == 0) weight += w[3];
            if (m == 3) weight = 0.0;
          }
          terms[m] = weight > 0.0 ? std::log(weight) + row.log_density[m][h]
                                  : -std::numeric_limits<double>::infinity();
          peak = std::max(peak, terms[m]);
        }
        double sum = 0.0;
        for (const double t : terms) sum += std::exp(t - peak);
        total -= peak + std::log(sum);
      }
    }
    return total;
  };

  EnsembleConfig tuned = base;
  for (int regime = 0; regime < 2; ++regime) {
    if (rows[regime].empty()) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& candidate : candidates) {
      const double s = score(rows[regime], candidate);
      if (s < best) {
        best = s;
        (regime == 0 ? tuned.slow_weights : tuned.moving_weights) = candidate;
      }
    }
  }
  return tuned;
}

}  // namespace pedbench

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

#ifndef PEDBENCH_METRICS_H_
#define PEDBENCH_METRICS_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pedbench/instance.h"
#include "pedbench/predictors.h"
#include "pedbench/types.h"

namespace pedbench {

// Regularisation added to a covariance only when it does not factorise.
inline constexpr double kCovarianceEpsilon = 1e-6;  // m^2

// How predRMS, expRMS and NLL treat the steps up to a horizon. minADE always
// averages over steps 1..K_T and minFDE always reads step K_T.
enum class HorizonConvention {
  kAtHorizon,          // displacement / likelihood at step K_T only
  kAveragedToHorizon,  // mean over steps 1..K_T
};

std::string_view to_string(HorizonConvention convention);
HorizonConvention parse_horizon_convention(std::string_view name);

struct HorizonSet {
  std::vector<double> horizons_s{1.0, 2.0, 3.0};
};

// K_T = T * rate. Throws InvalidArgument when T is not a positive multiple of
// the period and HorizonExceedsFuture when K_T > future_steps.
int horizon_step(double horizon_s, double rate_hz, std::size_t future_steps);

// log N(x; mean, cov). Falls back to cov + eps I when cov has no Cholesky
// factor; throws SingularCovariance if that fails too.
double gaussian_log_density(const Vec2& x, const Vec2& mean, const Mat2& cov);

// Highest-weight mode; ties go to the lowest index.
std::size_t top_mode(const MultimodalPrediction& prediction);

// Per-instance metrics. `k_t` is the 1-based horizon step.
double min_ade(const MultimodalPrediction& prediction,
               std::span<const TimedPoint> truth, int k_t);
double min_fde(const MultimodalPrediction& prediction,
               std::span<const TimedPoint> truth, int k_t);
double nll(const MultimodalPrediction& prediction,
           std::span<const TimedPoint> truth, int k_t,
           HorizonConvention convention = HorizonConvention::kAtHorizon);

struct EvaluationCase {
  const MultimodalPrediction* prediction = nullptr;
  std::span<const TimedPoint> truth;
};

// Dataset aggregates.
double pred_rms(std::span<const EvaluationCase> cases, int k_t,
                HorizonConvention convention = HorizonConvention::kAtHorizon);
double exp_rms(std::span<const EvaluationCase> cases, int k_t,
               HorizonConvention convention = HorizonConvention::kAtHorizon);

enum class Metric { kRms, kPredRms, kMinAde, kMinFde, kExpRms, kNll };
inline constexpr Metric kAllMetrics[] = {Metric::kRms,    Metric::kPredRms,
                                         Metric::kMinAde, Metric::kMinFde,
                                         Metric::kExpRms, Metric::kNll};

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view name);

struct MetricRow {
  Metric metric = Metric::kRms;
  std::string predictor;
  std::vector<double> values;  // one per horizon
};

struct ReportTable {
  std::string variant;  // "full" or "motion-changes"
  std::size_t n_instances = 0;
  std::vector<double> horizons_s;
  std::vector<MetricRow> rows;

  const MetricRow* find(Metric metric, std::string_view predictor) const;
};

struct MetricsConfig {
  HorizonSet horizons;
  HorizonConvention convention = HorizonConvention::kAtHorizon;
};

// Scores predictions aligned index-by-index with `instances`. Unimodal
// predictors get only the RMS row; multimodal ones get the five multimodal
// rows. Per-instance work runs in parallel; sums are compensated and taken in
// instance order.
ReportTable evaluate(std::span<const PredictionInstance> instances,
                     std::span<const MultimodalPrediction> predictions,
                     std::string_view predictor_name, bool unimodal,
                     const MetricsConfig& config, double rate_hz,
                     std::string_view variant);

// Checks external predictions against the instances: every instance covered
// exactly once, weights in [0, 1] summing to 1 (1e-6), shared timestamps equal
// to the ground-truth future, finite values and PSD covariances (eigenvalues
// >= -1e-12, then clamped to zero). Returns predictions in instance order.
// Throws InvalidPredictions.
std::vector<MultimodalPrediction> validate_predictions(
    std::span<const PredictionInstance> instances,
    std::vector<MultimodalPrediction> predictions);

}  // namespace pedbench

#endif  // PEDBENCH_METRICS_H_

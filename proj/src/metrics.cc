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

#include "pedbench/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <unordered_map>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "pedbench/error.h"
#include "pedbench/parallel.h"

namespace pedbench {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_prediction(const MultimodalPrediction& prediction,
                      std::span<const TimedPoint> truth, int k_t) {
  if (prediction.modes.empty()) {
    throw Error(ErrorCode::kInvalidPredictions,
                "prediction " + prediction.instance_id + " has no modes");
  }
  if (k_t < 1 || static_cast<std::size_t>(k_t) > truth.size()) {
    throw Error(ErrorCode::kHorizonExceedsFuture,
                "horizon step " + std::to_string(k_t) + " exceeds the future");
  }
  for (const ModePrediction& mode : prediction.modes) {
    if (mode.steps.size() < static_cast<std::size_t>(k_t)) {
      throw Error(ErrorCode::kHorizonExceedsFuture,
                  "prediction " + prediction.instance_id +
                      " is shorter than the horizon");
    }
  }
}

double distance(const ModePrediction& mode, std::span<const TimedPoint> truth,
                std::size_t k) {
  return (mode.steps[k].mean - truth[k].position).norm();
}

// Steps that enter a horizon aggregate under `convention`.
std::pair<std::size_t, std::size_t> step_range(int k_t, HorizonConvention convention) {
  const auto last = static_cast<std::size_t>(k_t);
  return convention == HorizonConvention::kAtHorizon
             ? std::pair<std::size_t, std::size_t>{last - 1, last}
             : std::pair<std::size_t, std::size_t>{0, last};
}

double nll_at_step(const MultimodalPrediction& prediction,
                   std::span<const TimedPoint> truth, std::size_t k) {
  std::vector<double> terms;
  terms.reserve(prediction.modes.size());
  double peak = kNegInf;
  for (const ModePrediction& mode : prediction.modes) {
    if (!(mode.weight > 0.0)) continue;
    const ModeStep& step = mode.steps[k];
    const double term = std::log(mode.weight) +
                        gaussian_log_density(truth[k].position, step.mean,
                                             step.covariance);
    terms.push_back(term);
    peak = std::max(peak, term);
  }
  if (peak == kNegInf) return std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (const double t : terms) sum += std::exp(t - peak);
  return -(peak + std::log(sum));
}

// Squared top-mode and expected squared displacement over the step range.
struct SquaredErrors {
  double top = 0.0;
  double expected = 0.0;
};

SquaredErrors squared_errors(const MultimodalPrediction& prediction,
                             std::span<const TimedPoint> truth, int k_t,
                             HorizonConvention convention) {
  const auto [begin, end] = step_range(k_t, convention);
  const ModePrediction& top = prediction.modes[top_mode(prediction)];
  SquaredErrors out;
  for (std::size_t k = begin; k < end; ++k) {
    const double d = distance(top, truth, k);
    out.top += d * d;
    for (const ModePrediction& mode : prediction.modes) {
      const double dm = distance(mode, truth, k);
      out.expected += mode.weight * dm * dm;
    }
  }
  const auto n = static_cast<double>(end - begin);
  out.top /= n;
  out.expected /= n;
  return out;
}

double root_mean(std::span<const EvaluationCase> cases, int k_t,
                 HorizonConvention convention, bool expected) {
  if (cases.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no instances to aggregate");
  }
  CompensatedSum sum;
  for (const EvaluationCase& c : cases) {
    check_prediction(*c.prediction, c.truth, k_t);
    const SquaredErrors e = squared_errors(*c.prediction, c.truth, k_t, convention);
    sum.add(expected ? e.expected : e.top);
  }
  return std::sqrt(sum.value() / static_cast<double>(cases.size()));
}

}  // namespace

std::string_view to_string(HorizonConvention convention) {
  return convention == HorizonConvention::kAtHorizon ? "at-horizon"
                                                     : "averaged-to-horizon";
}

HorizonConvention parse_horizon_convention(std::string_view name) {
  if (name == "at-horizon") return HorizonConvention::kAtHorizon;
  if (name == "averaged-to-horizon") return HorizonConvention::kAveragedToHorizon;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown horizon convention '" + std::string(name) + "'");
}

int horizon_step(double horizon_s, double rate_hz, std::size_t future_steps) {
  const int k = steps_for_duration(horizon_s, rate_hz);
  if (static_cast<std::size_t>(k) > future_steps) {
    throw Error(ErrorCode::kHorizonExceedsFuture,
                "horizon " + std::to_string(horizon_s) +
                    " s exceeds the future window");
  }
  return k;
}

double gaussian_log_density(const Vec2& x, const Vec2& mean, const Mat2& cov) {
  Eigen::LLT<Mat2> llt(cov);
  if (llt.info() != Eigen::Success || !(llt.matrixL()(0, 0) > 0.0) ||
      !(llt.matrixL()(1, 1) > 0.0)) {
    llt.compute(cov + kCovarianceEpsilon * Mat2::Identity());
    if (llt.info() != Eigen::Success || !(llt.matrixL()(1, 1) > 0.0)) {
      throw Error(ErrorCode::kSingularCovariance,
                  "covariance is singular after regularisation");
    }
  }
  const Mat2 lower = llt.matrixL();
  const Vec2 z = lower.triangularView<Eigen::Lower>().solve(x - mean);
  const double log_det = 2.0 * (std::log(lower(0, 0)) + std::log(lower(1, 1)));
  return -std::log(2.0 * std::numbers::pi) - 0.5 * log_det - 0.5 * z.squaredNorm();
}

std::size_t top_mode(const MultimodalPrediction& prediction) {
  std::size_t best = 0;
  for (std::size_t m = 1; m < prediction.modes.size(); ++m) {
    if (prediction.modes[m].weight > prediction.modes[best].weight) best = m;
  }
  return best;
}

double min_ade(const MultimodalPrediction& prediction,
               std::span<const TimedPoint> truth, int k_t) {
  check_prediction(prediction, truth, k_t);
  double best = std::numeric_limits<double>::infinity();
  for (const ModePrediction& mode : prediction.modes) {
    double sum = 0.0;
    for (std::size_t k = 0; k < static_cast<std::size_t>(k_t); ++k) {
      sum += distance(mode, truth, k);
    }
    best = std::min(best, sum / k_t);
  }
  return best;
}

double min_fde(const MultimodalPrediction& prediction,
               std::span<const TimedPoint> truth, int k_t) {
  check_prediction(prediction, truth, k_t);
  double best = std::numeric_limits<double>::infinity();
  for (const ModePrediction& mode : prediction.modes) {
    best = std::min(best, distance(mode, truth, static_cast<std::size_t>(k_t) - 1));
  }
  return best;
}

double nll(const MultimodalPrediction& prediction,
           std::span<const TimedPoint> truth, int k_t,
           HorizonConvention convention) {
  check_prediction(prediction, truth, k_t);
  const auto [begin, end] = step_range(k_t, convention);
  double sum = 0.0;
  for (std::size_t k = begin; k < end; ++k) sum += nll_at_step(prediction, truth, k);
  return sum / static_cast<double>(end - begin);
}

double pred_rms(std::span<const EvaluationCase> cases, int k_t,
                HorizonConvention convention) {
  return root_mean(cases, k_t, convention, false);
}

double exp_rms(std::span<const EvaluationCase> cases, int k_t,
               HorizonConvention convention) {
  return root_mean(cases, k_t, convention, true);
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kRms: return "RMS";
    case Metric::kPredRms: return "predRMS";
    case Metric::kMinAde: return "minADE";
    case Metric::kMinFde: return "minFDE";
    case Metric::kExpRms: return "expRMS";
    case Metric::kNll: return "NLL";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  for (const Metric m : kAllMetrics) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + std::string(name) + "'");
}

const MetricRow* ReportTable::find(Metric metric, std::string_view predictor) const {
  for (const MetricRow& row : rows) {
    if (row.metric == metric && row.predictor == predictor) return &row;
  }
  return nullptr;
}

ReportTable evaluate(std::span<const PredictionInstance> instances,
                     std::span<const MultimodalPrediction> predictions,
                     std::string_view predictor_name, bool unimodal,
                     const MetricsConfig& config, double rate_hz,
                     std::string_view variant) {
  if (instances.size() != predictions.size()) {
    throw Error(ErrorCode::kInvalidPredictions,
                "prediction count does not match instance count");
  }
  if (instances.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no instances to evaluate");
  }
  const std::size_t n = instances.size();
  const std::size_t future = instances.front().future.size();
  std::vector<int> steps;
  for (const double h : config.horizons.horizons_s) {
    steps.push_back(horizon_step(h, rate_hz, future));
  }
  const std::size_t nh = steps.size();

  // Per instance and horizon: minADE, minFDE, top sq, expected sq, NLL.
  struct Values {
    std::vector<double> min_ade, min_fde, top_sq, exp_sq, nll;
  };
  std::vector<Values> per_instance(n);
  parallel_for(n, [&](std::size_t i) {
    const auto& truth = instances[i].future;
    const auto& prediction = predictions[i];
    Values& v = per_instance[i];
    for (const int k_t : steps) {
      check_prediction(prediction, truth, k_t);
      const SquaredErrors e = squared_errors(prediction, truth, k_t, config.convention);
      v.top_sq.push_back(e.top);
      v.exp_sq.push_back(e.expected);
      if (!unimodal) {
        v.min_ade.push_back(min_ade(prediction, truth, k_t));
        v.min_fde.push_back(min_fde(prediction, truth, k_t));
        v.nll.push_back(nll(prediction, truth, k_t, config.convention));
      }
    }
  });

  auto mean_of = [&](auto member, bool root) {
    std::vector<double> out(nh);
    for (std::size_t h = 0; h < nh; ++h) {
      CompensatedSum sum;
      for (const Values& v : per_instance) sum.add((v.*member)[h]);
      const double mean = sum.value() / static_cast<double>(n);
      out[h] = root ? std::sqrt(mean) : mean;
    }
    return out;
  };

  ReportTable table;
  table.variant = std::string(variant);
  table.n_instances = n;
  table.horizons_s = config.horizons.horizons_s;
  const std::string name(predictor_name);
  if (unimodal) {
    table.rows.push_back({Metric::kRms, name, mean_of(&Values::top_sq, true)});
  } else {
    table.rows.push_back({Metric::kPredRms, name, mean_of(&Values::top_sq, true)});
    table.rows.push_back({Metric::kMinAde, name, mean_of(&Values::min_ade, false)});
    table.rows.push_back({Metric::kMinFde, name, mean_of(&Values::min_fde, false)});
    table.rows.push_back({Metric::kExpRms, name, mean_of(&Values::exp_sq, true)});
    table.rows.push_back({Metric::kNll, name, mean_of(&Values::nll, false)});
  }
  return table;
}

std::vector<MultimodalPrediction> validate_predictions(
    std::span<const PredictionInstance> instances,
    std::vector<MultimodalPrediction> predictions) {
  auto fail = [](const std::string& message) {
    throw Error(ErrorCode::kInvalidPredictions, message);
  };
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (!index.emplace(predictions[i].instance_id, i).second) {
      fail("duplicate prediction for instance " + predictions[i].instance_id);
    }
  }
  std::vector<MultimodalPrediction> ordered;
  ordered.reserve(instances.size());
  std::size_t missing = 0;
  std::string first_missing;
  for (const PredictionInstance& instance : instances) {
    const auto it = index.find(instance.instance_id);
    if (it == index.end()) {
      if (missing++ == 0) first_missing = instance.instance_id;
      continue;
    }
    MultimodalPrediction p = std::move(predictions[it->second]);
    const std::string& id = instance.instance_id;
    if (p.modes.empty()) fail("prediction " + id + " has no modes");
    double weight_sum = 0.0;
    for (ModePrediction& mode : p.modes) {
      if (!(mode.weight >= 0.0 && mode.weight <= 1.0)) {
        fail("prediction " + id + " has a weight outside [0, 1]");
      }
      weight_sum += mode.weight;
      if (mode.steps.size() != instance.future.size()) {
        fail("prediction " + id + " has " + std::to_string(mode.steps.size()) +
             " steps, expected " + std::to_string(instance.future.size()));
      }
      for (std::size_t k = 0; k < mode.steps.size(); ++k) {
        ModeStep& step = mode.steps[k];
        if (step.t != instance.future[k].t) {
          fail("prediction " + id + " timestamps differ from the future window");
        }
        if (!step.mean.allFinite() || !step.covariance.allFinite()) {
          fail("prediction " + id + " has non-finite values");
        }
        if (step.covariance(0, 1) != step.covariance(1, 0)) {
          fail("prediction " + id + " has an asymmetric covariance");
        }
        Eigen::SelfAdjointEigenSolver<Mat2> eig(step.covariance);
        if (eig.eigenvalues().minCoeff() < -1e-12) {
          fail("prediction " + id + " has a covariance that is not PSD");
        }
        if (eig.eigenvalues().minCoeff() < 0.0) {
          const Eigen::Vector2d clamped = eig.eigenvalues().cwiseMax(0.0);
          step.covariance = eig.eigenvectors() * clamped.asDiagonal() *
                            eig.eigenvectors().transpose();
        }
      }
    }
    if (std::abs(weight_sum - 1.0) > 1e-6) {
      fail("prediction " + id + " weights sum to " + std::to_string(weight_sum));
    }
    ordered.push_back(std::move(p));
  }
  if (missing > 0) {
    fail(std::to_string(missing) + " instances have no prediction (first: " +
         first_missing + ")");
  }
  return ordered;
}

}  // namespace pedbench

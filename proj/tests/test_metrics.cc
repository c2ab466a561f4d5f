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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "test_util.h"

namespace pedbench {
namespace {

using test::code_of;

const double kLn2Pi = std::log(2.0 * std::numbers::pi);

std::vector<TimedPoint> truth_line(int n) {
  std::vector<TimedPoint> out;
  for (int k = 1; k <= n; ++k) out.push_back({k * 100'000, Vec2(0.1 * k, 0.0)});
  return out;
}

// Mode whose error is `offset` at every step.
ModePrediction offset_mode(const std::vector<TimedPoint>& truth, Vec2 offset, double weight,
                           double variance = 1.0) {
  ModePrediction m;
  m.weight = weight;
  for (const TimedPoint& p : truth) {
    m.steps.push_back({p.t, p.position + offset, variance * Mat2::Identity()});
  }
  return m;
}

TEST(Nll, AnalyticAnchors) {
  const auto truth = truth_line(30);
  MultimodalPrediction p{"x", {offset_mode(truth, Vec2::Zero(), 1.0)}};
  EXPECT_NEAR(nll(p, truth, 30), kLn2Pi, 1e-12);
  EXPECT_NEAR(nll(p, truth, 30), 1.8379, 5e-5);
  p.modes[0] = offset_mode(truth, Vec2(1, 0), 1.0);
  EXPECT_NEAR(nll(p, truth, 30), kLn2Pi + 0.5, 1e-12);
  EXPECT_NEAR(nll(p, truth, 30), 2.3379, 5e-5);
}

TEST(Nll, IdenticalModesCollapse) {
  const auto truth = truth_line(30);
  const MultimodalPrediction single{"x", {offset_mode(truth, Vec2(0.3, -0.2), 1.0, 0.5)}};
  const MultimodalPrediction split{"x", {offset_mode(truth, Vec2(0.3, -0.2), 0.3, 0.5),
                                         offset_mode(truth, Vec2(0.3, -0.2), 0.7, 0.5)}};
  EXPECT_NEAR(nll(single, truth, 20), nll(split, truth, 20), 1e-12);
}

TEST(Nll, FarOutliersStayFinite) {
  const auto truth = truth_line(30);
  const MultimodalPrediction p{"x", {offset_mode(truth, Vec2(60, 0), 0.5, 0.01),
                                     offset_mode(truth, Vec2(80, 0), 0.5, 0.01)}};
  const double v = nll(p, truth, 30);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_GT(v, 1e4);
}

TEST(Nll, AveragedConvention) {
  const auto truth = truth_line(30);
  MultimodalPrediction p{"x", {offset_mode(truth, Vec2::Zero(), 1.0)}};
  for (int k = 0; k < 10; ++k) p.modes[0].steps[k].mean.x() += 1.0;
  // Steps 1..10 have error 1, so the average over 1..20 adds 0.25.
  EXPECT_NEAR(nll(p, truth, 20, HorizonConvention::kAveragedToHorizon), kLn2Pi + 0.25, 1e-12);
  EXPECT_NEAR(nll(p, truth, 20, HorizonConvention::kAtHorizon), kLn2Pi, 1e-12);
}

TEST(GaussianLogDensity, SingularFallback) {
  Mat2 rank_one;
  rank_one << 1, 1, 1, 1;
  EXPECT_TRUE(std::isfinite(gaussian_log_density(Vec2::Zero(), Vec2::Zero(), rank_one)));
  EXPECT_TRUE(std::isfinite(gaussian_log_density(Vec2::Zero(), Vec2::Zero(), Mat2::Zero())));
  Mat2 negative = -Mat2::Identity();
  EXPECT_EQ(code_of([&] { gaussian_log_density(Vec2::Zero(), Vec2::Zero(), negative); }),
            ErrorCode::kSingularCovariance);
}

TEST(MinAdeFde, Examples) {
  const auto truth = truth_line(30);
  const MultimodalPrediction p{"x", {offset_mode(truth, Vec2(1.0, 0), 0.5),
                                     offset_mode(truth, Vec2(0, 0.2), 0.5)}};
  EXPECT_NEAR(min_ade(p, truth, 30), 0.2, 1e-12);

  MultimodalPrediction f{"x", {offset_mode(truth, Vec2::Zero(), 1.0)}};
  EXPECT_DOUBLE_EQ(min_fde(f, truth, 30), 0.0);
  const MultimodalPrediction g{"x", {offset_mode(truth, Vec2(1, 0), 0.5),
                                     offset_mode(truth, Vec2(0, 3), 0.5)}};
  EXPECT_NEAR(min_fde(g, truth, 30), 1.0, 1e-12);
}

TEST(MinAde, SingleModeIsPlainAde) {
  const auto truth = truth_line(30);
  MultimodalPrediction p{"x", {offset_mode(truth, Vec2::Zero(), 1.0)}};
  double sum = 0;
  for (int k = 0; k < 20; ++k) {
    p.modes[0].steps[k].mean.y() = 0.01 * k * k;
    sum += 0.01 * k * k;
  }
  EXPECT_NEAR(min_ade(p, truth, 20), sum / 20, 1e-12);
}

TEST(PredRms, Examples) {
  const auto truth = truth_line(30);
  const MultimodalPrediction a{"a", {offset_mode(truth, Vec2(2, 0), 1.0)}};
  const MultimodalPrediction b{"b", {offset_mode(truth, Vec2::Zero(), 1.0)}};
  const std::vector<EvaluationCase> one{{&a, truth}};
  EXPECT_NEAR(pred_rms(one, 30), 2.0, 1e-12);
  const std::vector<EvaluationCase> two{{&a, truth}, {&b, truth}};
  EXPECT_NEAR(pred_rms(two, 30), std::sqrt(2.0), 1e-12);
  EXPECT_DOUBLE_EQ(pred_rms(two, 30), exp_rms(two, 30));
}

TEST(PredRms, TopModeTieGoesToFirst) {
  const auto truth = truth_line(30);
  const MultimodalPrediction p{"x", {offset_mode(truth, Vec2(1, 0), 0.5),
                                     offset_mode(truth, Vec2(3, 0), 0.5)}};
  EXPECT_EQ(top_mode(p), 0u);
  const std::vector<EvaluationCase> cases{{&p, truth}};
  EXPECT_NEAR(pred_rms(cases, 30), 1.0, 1e-12);
}

TEST(ExpRms, Examples) {
  const auto truth = truth_line(30);
  const MultimodalPrediction p{"x", {offset_mode(truth, Vec2::Zero(), 0.75),
                                     offset_mode(truth, Vec2(0, 2), 0.25)}};
  const std::vector<EvaluationCase> cases{{&p, truth}};
  EXPECT_NEAR(exp_rms(cases, 30), 1.0, 1e-12);

  const MultimodalPrediction same{"y", {offset_mode(truth, Vec2(1, 1), 0.4),
                                        offset_mode(truth, Vec2(1, 1), 0.6)}};
  const std::vector<EvaluationCase> s{{&same, truth}};
  EXPECT_NEAR(exp_rms(s, 30), pred_rms(s, 30), 1e-12);
}

TEST(HorizonStep, Conversions) {
  EXPECT_EQ(horizon_step(1.0, 10.0, 30), 10);
  EXPECT_EQ(horizon_step(3.0, 10.0, 30), 30);
  EXPECT_EQ(code_of([] { horizon_step(4.0, 10.0, 30); }), ErrorCode::kHorizonExceedsFuture);
  EXPECT_EQ(code_of([] { horizon_step(0.15, 10.0, 30); }), ErrorCode::kInvalidArgument);
}

TEST(MetricNames, RoundTrip) {
  for (const Metric m : kAllMetrics) EXPECT_EQ(parse_metric(to_string(m)), m);
  for (const HorizonConvention c :
       {HorizonConvention::kAtHorizon, HorizonConvention::kAveragedToHorizon}) {
    EXPECT_EQ(parse_horizon_convention(to_string(c)), c);
  }
}

PredictionInstance line_instance(const std::string& id) {
  return test::instance_from(id, [](double t) { return Vec2(t, 0.0); });
}

MultimodalPrediction exact_prediction(const PredictionInstance& x, double weight_split = 1.0) {
  MultimodalPrediction p{x.instance_id, {}};
  ModePrediction m;
  m.weight = weight_split;
  for (const TimedPoint& f : x.future) m.steps.push_back({f.t, f.position, Mat2::Identity()});
  p.modes.push_back(m);
  if (weight_split < 1.0) {
    ModePrediction other = m;
    other.weight = 1.0 - weight_split;
    for (ModeStep& s : other.steps) s.mean += Vec2(1, 0);
    p.modes.push_back(other);
  }
  return p;
}

TEST(Evaluate, PerfectUnimodalIsZero) {
  const std::vector<PredictionInstance> xs{line_instance("a"), line_instance("b")};
  const std::vector<MultimodalPrediction> ps{exact_prediction(xs[0]), exact_prediction(xs[1])};
  const ReportTable t = evaluate(xs, ps, "cv", true, MetricsConfig{}, 10.0, "full");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].metric, Metric::kRms);
  EXPECT_EQ(t.n_instances, 2u);
  EXPECT_EQ(t.horizons_s, (std::vector<double>{1, 2, 3}));
  for (const double v : t.rows[0].values) EXPECT_EQ(v, 0.0);
  ASSERT_NE(t.find(Metric::kRms, "cv"), nullptr);
  EXPECT_EQ(t.find(Metric::kNll, "cv"), nullptr);
}

TEST(Evaluate, MultimodalRows) {
  const std::vector<PredictionInstance> xs{line_instance("a")};
  const std::vector<MultimodalPrediction> ps{exact_prediction(xs[0], 0.75)};
  const ReportTable t = evaluate(xs, ps, "mix", false, MetricsConfig{}, 10.0, "full");
  ASSERT_EQ(t.rows.size(), 5u);
  EXPECT_DOUBLE_EQ(t.find(Metric::kPredRms, "mix")->values[2], 0.0);
  EXPECT_DOUBLE_EQ(t.find(Metric::kMinAde, "mix")->values[2], 0.0);
  EXPECT_NEAR(t.find(Metric::kExpRms, "mix")->values[2], 0.5, 1e-12);
}

TEST(ValidatePredictions, Rejections) {
  const std::vector<PredictionInstance> xs{line_instance("a"), line_instance("b")};
  auto good = std::vector<MultimodalPrediction>{exact_prediction(xs[1]), exact_prediction(xs[0])};
  const auto ordered = validate_predictions(xs, good);
  EXPECT_EQ(ordered[0].instance_id, "a");

  auto expect_invalid = [&](std::vector<MultimodalPrediction> ps) {
    EXPECT_EQ(code_of([&] { validate_predictions(xs, ps); }), ErrorCode::kInvalidPredictions);
  };
  expect_invalid({exact_prediction(xs[0])});                           // missing
  expect_invalid({exact_prediction(xs[0]), exact_prediction(xs[0])});  // duplicate
  auto weights = good;
  weights[0].modes[0].weight = 0.9;
  expect_invalid(weights);
  auto times = good;
  times[0].modes[0].steps[3].t += 1;
  expect_invalid(times);
  auto short_steps = good;
  short_steps[0].modes[0].steps.pop_back();
  expect_invalid(short_steps);
  auto not_psd = good;
  not_psd[0].modes[0].steps[0].covariance << 1, 2, 2, 1;
  expect_invalid(not_psd);
  auto asym = good;
  asym[0].modes[0].steps[0].covariance << 1, 0.5, 0.1, 1;
  expect_invalid(asym);
  auto nan = good;
  nan[0].modes[0].steps[0].mean.x() = std::nan("");
  expect_invalid(nan);
}

}  // namespace
}  // namespace pedbench

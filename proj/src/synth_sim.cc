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

#include "pedbench/synth_sim.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include "json.hpp"
#include "pedbench/error.h"
#include "pedbench/parallel.h"

namespace pedbench {
namespace {

int phase_steps(const Phase& phase, double fine_rate_hz) {
  const double steps = phase.duration_s * fine_rate_hz;
  return static_cast<int>(std::llround(steps));
}

}  // namespace

std::string_view to_string(PhaseKind kind) {
  switch (kind) {
    case PhaseKind::kStand: return "stand";
    case PhaseKind::kWalk: return "walk";
    case PhaseKind::kAccelerate: return "accelerate";
    case PhaseKind::kDecelerate: return "decelerate";
    case PhaseKind::kTurn: return "turn";
  }
  return "unknown";
}

PhaseKind parse_phase_kind(std::string_view name) {
  for (const PhaseKind k : {PhaseKind::kStand, PhaseKind::kWalk, PhaseKind::kAccelerate,
                            PhaseKind::kDecelerate, PhaseKind::kTurn}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::kInvalidScript, "unknown phase '" + std::string(name) + "'");
}

double ScenarioParams::duration_s() const {
  double total = 0.0;
  for (const Phase& p : script) total += p.duration_s;
  return total;
}

void ScenarioParams::validate() const {
  auto fail = [](const std::string& message) {
    throw Error(ErrorCode::kInvalidScript, message);
  };
  if (script.empty()) fail("script is empty");
  if (!(noise_sigma >= 0.0)) fail("noise sigma must be non-negative");
  try {
    period_us(fine_rate_hz);
    period_us(native_rate_hz);
  } catch (const Error& e) {
    fail(e.what());
  }
  const double ratio = fine_rate_hz / native_rate_hz;
  if (!(ratio >= 1.0) || std::abs(ratio - std::round(ratio)) > 1e-9) {
    fail("fine rate must be an integer multiple of the native rate");
  }
  for (const Phase& p : script) {
    const double steps = p.duration_s * fine_rate_hz;
    if (!(p.duration_s > 0.0) || std::abs(steps - std::round(steps)) > 1e-6 ||
        std::round(steps) < 1.0) {
      fail("phase duration must be a positive multiple of the fine period");
    }
    if (!(p.target_speed >= 0.0 && p.target_speed <= 3.0)) {
      fail("phase speed must lie in [0, 3] m/s");
    }
    if (!std::isfinite(p.turn_rate)) fail("turn rate must be finite");
  }
}

SyntheticTrack generate_scenario(const ScenarioParams& params) {
  params.validate();
  const double dt = 1.0 / params.fine_rate_hz;
  const TimestampUs fine_period = period_us(params.fine_rate_hz);

  SyntheticTrack out;
  out.truth.agent_id = params.agent_id;
  out.truth.camera_view = params.camera_view;
  out.truth.rate_hz = params.fine_rate_hz;

  Vec2 position = params.origin;
  double heading = params.initial_heading;
  const Phase& first = params.script.front();
  double speed = first.kind == PhaseKind::kWalk || first.kind == PhaseKind::kTurn
                     ? first.target_speed
                     : 0.0;
  std::vector<double> headings{heading};
  out.truth.steps.push_back({0, position, std::nullopt});
  out.mode_labels.push_back(first.kind);

  TimestampUs t = 0;
  for (const Phase& phase : params.script) {
    const int steps = phase_steps(phase, params.fine_rate_hz);
    const double start_speed = speed;
    for (int k = 1; k <= steps; ++k) {
      double begin_speed = speed, end_speed = speed, turn = 0.0;
      switch (phase.kind) {
        case PhaseKind::kStand:
          begin_speed = end_speed = 0.0;
          break;
        case PhaseKind::kWalk:
          begin_speed = end_speed = phase.target_speed;
          break;
        case PhaseKind::kAccelerate:
        case PhaseKind::kDecelerate: {
          const double slope = (phase.target_speed - start_speed) / steps;
          begin_speed = start_speed + slope * (k - 1);
          end_speed = k == steps ? phase.target_speed : start_speed + slope * k;
          break;
        }
        case PhaseKind::kTurn:
          begin_speed = end_speed = phase.target_speed;
          turn = phase.turn_rate * dt;
          break;
      }
      double length = 0.5 * (begin_speed + end_speed) * dt;
      if (turn != 0.0) length = 2.0 * begin_speed * std::sin(0.5 * turn) / phase.turn_rate;
      const double chord_heading = heading + 0.5 * turn;
      position += length * Vec2(std::cos(chord_heading), std::sin(chord_heading));
      heading += turn;
      speed = end_speed;
      t += fine_period;
      out.truth.steps.push_back({t, position, std::nullopt});
      out.mode_labels.push_back(phase.kind);
      headings.push_back(heading);
    }
  }

  out.observed.agent_id = params.agent_id;
  out.observed.camera_view = params.camera_view;
  const auto stride =
      static_cast<std::size_t>(std::llround(params.fine_rate_hz / params.native_rate_hz));
  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> noise(0.0, params.noise_sigma);
  for (std::size_t i = 0; i < out.truth.steps.size(); i += stride) {
    RawSample sample;
    sample.t = out.truth.steps[i].t;
    Vec2 p = out.truth.steps[i].position;
    if (params.noise_sigma > 0.0) {
      const double nx = noise(rng);
      const double ny = noise(rng);
      p += Vec2(nx, ny);
    }
    sample.position = Vec3(p.x(), p.y(), 0.0);
    sample.box_size = params.box_size;
    sample.yaw = std::remainder(headings[i], 2.0 * std::numbers::pi);
    out.observed.samples.push_back(sample);
  }
  return out;
}

RawTrack apply_smoothing_artifact(const RawTrack& track, int window) {
  if (window < 3 || window % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "smoothing window must be odd and >= 3");
  }
  RawTrack out = track;
  const auto n = static_cast<std::ptrdiff_t>(track.samples.size());
  const std::ptrdiff_t half = window / 2;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t h = std::min({half, i, n - 1 - i});
    Vec3 sum = Vec3::Zero();
    for (std::ptrdiff_t j = i - h; j <= i + h; ++j) sum += track.samples[j].position;
    out.samples[i].position = sum / static_cast<double>(2 * h + 1);
  }
  return out;
}

std::vector<ScenarioParams> draw_corpus_scenarios(const CorpusConfig& config) {
  const int total = steps_for_duration(config.duration_s, config.fine_rate_hz);
  const int ramp = steps_for_duration(config.ramp_s, config.fine_rate_hz);
  const int one_second = steps_for_duration(1.0, config.fine_rate_hz);
  if (total < one_second + ramp + 1) {
    throw Error(ErrorCode::kInvalidScript, "corpus duration too short for transitions");
  }
  const double dt = 1.0 / config.fine_rate_hz;

  std::vector<ScenarioParams> scenarios(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    std::seed_seq seq{static_cast<std::uint64_t>(config.seed & 0xffffffffu),
                      static_cast<std::uint64_t>(config.seed >> 32),
                      static_cast<std::uint64_t>(i)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    auto steps_between = [&](int lo, int hi) {
      return lo + static_cast<int>(std::floor(unit(rng) * (hi - lo + 1)));
    };

    ScenarioParams& s = scenarios[i];
    char id[32];
    std::snprintf(id, sizeof(id), "synth-%05zu", i);
    s.agent_id = id;
    s.seed = rng();
    s.noise_sigma = config.noise_sigma;
    s.native_rate_hz = config.native_rate_hz;
    s.fine_rate_hz = config.fine_rate_hz;
    s.origin = Vec2(uniform(-50.0, 50.0), uniform(-50.0, 50.0));
    s.initial_heading = uniform(-std::numbers::pi, std::numbers::pi);

    // Category cycles with period 5 so every prefix of the corpus has at least
    // 40% transition scenarios; one slot alternates walk / stand / turn.
    enum { kInitiation, kStop, kWalk, kStand, kTurn } category;
    switch (i % 5) {
      case 0: category = kInitiation; break;
      case 1: category = kStop; break;
      case 2: category = kWalk; break;
      case 3: category = kStand; break;
      default:
        category = (i / 5) % 4 == 0 ? kTurn : (i / 5) % 2 == 1 ? kWalk : kStand;
        break;
    }
    const double speed = uniform(0.8, 1.8);
    auto phase = [dt](PhaseKind kind, int steps, double target, double turn = 0.0) {
      return Phase{kind, steps * dt, target, turn};
    };
    if (category == kInitiation) {
      const int onset = steps_between(one_second, total - ramp - 1);
      s.script = {phase(PhaseKind::kStand, onset, 0.0),
                  phase(PhaseKind::kAccelerate, ramp, speed),
                  phase(PhaseKind::kWalk, total - onset - ramp, speed)};
    } else if (category == kStop) {
      const int stop = steps_between(one_second, total - ramp - 1);
      s.script = {phase(PhaseKind::kWalk, stop, speed),
                  phase(PhaseKind::kDecelerate, ramp, 0.0),
                  phase(PhaseKind::kStand, total - stop - ramp, 0.0)};
    } else if (category == kWalk) {
      s.script = {phase(PhaseKind::kWalk, total, uniform(0.5, 1.8))};
    } else if (category == kStand) {
      s.script = {phase(PhaseKind::kStand, total, 0.0)};
    } else {
      const int before = steps_between(ramp, total / 2 - ramp);
      const int turning = steps_between(one_second, total / 2);
      const double rate = (unit(rng) < 0.5 ? -1.0 : 1.0) * uniform(0.2, 0.8);
      s.script = {phase(PhaseKind::kWalk, before, speed),
                  phase(PhaseKind::kTurn, turning, speed, rate),
                  phase(PhaseKind::kWalk, total - before - turning, speed)};
    }
  }
  return scenarios;
}

Corpus generate_corpus(const CorpusConfig& config, const BuildConfig& build) {
  Corpus corpus;
  corpus.scenarios = draw_corpus_scenarios(config);
  corpus.raw.resize(corpus.scenarios.size());
  parallel_for(corpus.scenarios.size(), [&](std::size_t i) {
    corpus.raw[i].track = generate_scenario(corpus.scenarios[i]).observed;
  });
  BuiltDataset built = build_dataset(corpus.raw, build);
  corpus.instances = std::move(built.full);
  corpus.motion_changes = std::move(built.motion_changes);
  corpus.warnings = std::move(built.warnings);
  return corpus;
}

void write_scenarios(const std::filesystem::path& path, const CorpusConfig& config,
                     const std::vector<ScenarioParams>& scenarios) {
  nlohmann::ordered_json doc;
  doc["n"] = config.n;
  doc["seed"] = config.seed;
  doc["duration_s"] = config.duration_s;
  doc["noise_sigma"] = config.noise_sigma;
  doc["native_rate_hz"] = config.native_rate_hz;
  doc["fine_rate_hz"] = config.fine_rate_hz;
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const ScenarioParams& s : scenarios) {
    nlohmann::ordered_json phases = nlohmann::ordered_json::array();
    for (const Phase& p : s.script) {
      phases.push_back({{"phase", to_string(p.kind)},
                        {"duration_s", p.duration_s},
                        {"target_speed", p.target_speed},
                        {"turn_rate", p.turn_rate}});
    }
    nlohmann::ordered_json entry;
    entry["agent_id"] = s.agent_id;
    entry["seed"] = s.seed;
    entry["origin"] = {s.origin.x(), s.origin.y()};
    entry["initial_heading"] = s.initial_heading;
    entry["phases"] = std::move(phases);
    list.push_back(std::move(entry));
  }
  doc["scenarios"] = std::move(list);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << doc.dump(1) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace pedbench

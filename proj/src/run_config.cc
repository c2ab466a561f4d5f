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

#include "pedbench/run_config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pedbench/error.h"

namespace pedbench {
namespace {

[[noreturn]] void bad(const std::string& message) {
  throw Error(ErrorCode::kInvalidArgument, message);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename Int>
Int parse_int(const std::string& text) {
  const std::string t = trim(text);
  Int value{};
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty()) {
    bad("expected an integer, got '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  bad("expected true or false, got '" + text + "'");
}

std::string format_list(const auto& values) {
  std::string out;
  for (const double v : values) {
    if (!out.empty()) out += ", ";
    out += format_double(v);
  }
  return out;
}

std::array<double, kNumModeKinds> parse_table(const std::string& text) {
  const std::vector<double> values = parse_double_list(text);
  if (values.size() != kNumModeKinds) bad("weight table needs 5 values");
  std::array<double, kNumModeKinds> table{};
  std::copy(values.begin(), values.end(), table.begin());
  return table;
}

struct Binding {
  const char* section;
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define PB_DOUBLE(sec, name, field)                                      \
  Binding{sec, name, [](const RunConfig& c) { return format_double(c.field); }, \
          [](RunConfig& c, const std::string& v) { c.field = parse_double(v); }}
#define PB_INT(sec, name, field, type)                                         \
  Binding{sec, name, [](const RunConfig& c) { return std::to_string(c.field); }, \
          [](RunConfig& c, const std::string& v) { c.field = parse_int<type>(v); }}
#define PB_STRING(sec, name, field)                            \
  Binding{sec, name, [](const RunConfig& c) { return c.field; }, \
          [](RunConfig& c, const std::string& v) { c.field = trim(v); }}

const std::vector<Binding>& bindings() {
  static const std::vector<Binding> table = {
      PB_DOUBLE("task", "history_s", task.history_s),
      PB_DOUBLE("task", "future_s", task.future_s),
      PB_DOUBLE("task", "rate_hz", task.rate_hz),
      PB_INT("task", "window_stride", task.window_stride, int),

      PB_INT("split", "train_parts", split.train_parts, int),
      PB_INT("split", "val_parts", split.val_parts, int),
      PB_INT("split", "seed", split.seed, std::uint64_t),

      Binding{"dataset", "resample",
              [](const RunConfig& c) { return std::string(to_string(c.resample)); },
              [](RunConfig& c, const std::string& v) {
                c.resample = parse_resample_mode(trim(v));
              }},
      PB_INT("dataset", "max_match_gap_us", max_match_gap_us, TimestampUs),
      PB_DOUBLE("dataset", "crop_factor", crop_factor),
      PB_STRING("dataset", "variant", variant),

      PB_DOUBLE("selection", "motion_threshold_m", motion_threshold_m),
      PB_INT("selection", "seed", selection_seed, std::uint64_t),

      PB_STRING("predictor", "name", predictor),
      PB_DOUBLE("predictor", "lambda", predictor_config.da.lambda),
      PB_DOUBLE("predictor", "heading_min_speed",
                predictor_config.kinematics.heading_min_speed),
      PB_STRING("predictor", "calibration_split", calibration_split),

      PB_DOUBLE("ensemble", "speed_gate", predictor_config.ensemble.speed_gate),
      PB_DOUBLE("ensemble", "walk_speed", predictor_config.ensemble.walk_speed),
      PB_DOUBLE("ensemble", "stop_decel", predictor_config.ensemble.stop_decel),
      Binding{"ensemble", "slow_weights",
              [](const RunConfig& c) {
                return format_list(c.predictor_config.ensemble.slow_weights);
              },
              [](RunConfig& c, const std::string& v) {
                c.predictor_config.ensemble.slow_weights = parse_table(v);
              }},
      Binding{"ensemble", "moving_weights",
              [](const RunConfig& c) {
                return format_list(c.predictor_config.ensemble.moving_weights);
              },
              [](RunConfig& c, const std::string& v) {
                c.predictor_config.ensemble.moving_weights = parse_table(v);
              }},
      Binding{"ensemble", "covariance",
              [](const RunConfig& c) {
                return std::string(c.predictor_config.ensemble.covariance ==
                                           CovarianceSource::kCalibrated
                                       ? "calibrated"
                                       : "default");
              },
              [](RunConfig& c, const std::string& v) {
                const std::string t = trim(v);
                if (t == "calibrated") {
                  c.predictor_config.ensemble.covariance = CovarianceSource::kCalibrated;
                } else if (t == "default") {
                  c.predictor_config.ensemble.covariance = CovarianceSource::kDefault;
                } else {
                  bad("covariance must be calibrated or default");
                }
              }},
      Binding{"ensemble", "tune_weights",
              [](const RunConfig& c) {
                return std::string(c.predictor_config.ensemble.tune_weights ? "true"
                                                                            : "false");
              },
              [](RunConfig& c, const std::string& v) {
                c.predictor_config.ensemble.tune_weights = parse_bool(v);
              }},

      Binding{"metrics", "horizons_s",
              [](const RunConfig& c) { return format_list(c.metrics.horizons.horizons_s); },
              [](RunConfig& c, const std::string& v) {
                c.metrics.horizons.horizons_s = parse_double_list(v);
              }},
      Binding{"metrics", "convention",
              [](const RunConfig& c) { return std::string(to_string(c.metrics.convention)); },
              [](RunConfig& c, const std::string& v) {
                c.metrics.convention = parse_horizon_convention(trim(v));
              }},
      PB_STRING("metrics", "eval_split", eval_split),

      PB_DOUBLE("audit", "v_on", onset.v_on),
      PB_DOUBLE("audit", "sustain_s", onset.sustain_s),
      PB_INT("audit", "smoothing_window", smoothing_window, int),

      PB_INT("synth", "n", synth.n, std::size_t),
      PB_INT("synth", "seed", synth.seed, std::uint64_t),
      PB_DOUBLE("synth", "duration_s", synth.duration_s),
      PB_DOUBLE("synth", "noise_sigma", synth.noise_sigma),
      PB_DOUBLE("synth", "native_rate_hz", synth.native_rate_hz),
      PB_DOUBLE("synth", "fine_rate_hz", synth.fine_rate_hz),
      PB_DOUBLE("synth", "ramp_s", synth.ramp_s),

      Binding{"io", "inputs",
              [](const RunConfig& c) {
                std::string out;
                for (const std::string& s : c.inputs) {
                  if (!out.empty()) out += ", ";
                  out += s;
                }
                return out;
              },
              [](RunConfig& c, const std::string& v) {
                c.inputs.clear();
                std::stringstream ss(v);
                std::string item;
                while (std::getline(ss, item, ',')) {
                  item = trim(item);
                  if (!item.empty()) c.inputs.push_back(item);
                }
              }},
      PB_STRING("io", "predictions", predictions),
      PB_STRING("io", "out", out_dir),
  };
  return table;
}

#undef PB_DOUBLE
#undef PB_INT
#undef PB_STRING

bool is_split_choice(const std::string& s, bool allow_auto) {
  return s == "all" || s == "train" || s == "val" || s == "test" ||
         (allow_auto && s == "auto");
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) bad("cannot format number");
  return std::string(buf, end);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty() ||
      !std::isfinite(value)) {
    bad("expected a number, got '" + text + "'");
  }
  return value;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
  if (out.empty()) bad("expected a comma-separated list of numbers");
  return out;
}

void RunConfig::validate() const {
  task.validate();
  split.validate();
  predictor_config.ensemble.validate();
  if (!(predictor_config.da.lambda > 0.0)) bad("lambda must be positive");
  if (!(predictor_config.kinematics.heading_min_speed >= 0.0)) {
    bad("heading_min_speed must be non-negative");
  }
  parse_predictor_kind(predictor);
  if (variant != "full" && variant != "motion-changes") {
    bad("variant must be full or motion-changes");
  }
  if (max_match_gap_us < 0) bad("max_match_gap_us must be non-negative");
  if (!(crop_factor > 0.0)) bad("crop_factor must be positive");
  if (!(motion_threshold_m >= 0.0)) bad("motion_threshold_m must be non-negative");
  if (!is_split_choice(calibration_split, false)) {
    bad("calibration_split must be all, train, val or test");
  }
  if (!is_split_choice(eval_split, true)) {
    bad("eval_split must be auto, all, train, val or test");
  }
  if (metrics.horizons.horizons_s.empty()) bad("at least one horizon is required");
  for (const double h : metrics.horizons.horizons_s) {
    horizon_step(h, task.rate_hz, static_cast<std::size_t>(task.future_steps()));
  }
  if (!(onset.v_on > 0.0) || !(onset.sustain_s >= 0.0)) {
    bad("onset detector needs v_on > 0 and sustain_s >= 0");
  }
  if (smoothing_window != 0 && (smoothing_window < 3 || smoothing_window % 2 == 0)) {
    bad("smoothing_window must be 0 or an odd number >= 3");
  }
}

BuildConfig RunConfig::build_config() const {
  BuildConfig b;
  b.task = task;
  b.split = split;
  b.mode = resample;
  b.max_match_gap_us = max_match_gap_us;
  b.crop_factor = crop_factor;
  b.motion_threshold_m = motion_threshold_m;
  b.selection_seed = selection_seed;
  b.kinematics = predictor_config.kinematics;
  return b;
}

std::vector<ConfigEntry> config_entries(const RunConfig& config) {
  std::vector<ConfigEntry> out;
  for (const Binding& b : bindings()) out.push_back({b.section, b.key, b.get(config)});
  return out;
}

RunConfig parse_run_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    bad(std::string("config: ") + e.what());
  }
  std::map<std::string, const Binding*> index;
  for (const Binding& b : bindings()) {
    index[std::string(b.section) + "." + b.key] = &b;
  }
  RunConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) bad("config: key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      const auto it = index.find(section + "." + key);
      if (it == index.end()) bad("config: unknown key " + section + "." + key);
      it->second->set(config, value.get_value<std::string>());
    }
  }
  config.validate();
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config " + path.string());
  return parse_run_config(in);
}

std::string to_ini(const RunConfig& config) {
  std::string out;
  std::string current;
  for (const ConfigEntry& e : config_entries(config)) {
    if (e.section != current) {
      if (!current.empty()) out += '\n';
      out += "[" + e.section + "]\n";
      current = e.section;
    }
    out += e.key + " = " + e.value + "\n";
  }
  return out;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  const auto ea = config_entries(a);
  const auto eb = config_entries(b);
  if (ea.size() != eb.size()) return false;
  for (std::size_t i = 0; i < ea.size(); ++i) {
    if (ea[i].value != eb[i].value) return false;
  }
  return true;
}

}  // namespace pedbench

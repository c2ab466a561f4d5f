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

#include "harness.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"
#include "pedbench/record_io.h"
#include "test_util.h"

namespace pedbench {
namespace {

namespace fs = std::filesystem;

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class HarnessTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ("pedbench_harness_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Straight-line walkers sampled at 2 Hz on a 10 Hz-compatible grid.
  fs::path write_cv_tracks(int n) {
    std::vector<RawTrackRecord> records;
    for (int i = 0; i < n; ++i) {
      const Vec2 v(0.3 + 0.01 * i, -0.5 + 0.02 * i);
      std::vector<std::pair<double, Vec2>> samples;
      for (int k = 0; k <= 12; ++k) samples.push_back({0.5 * k, Vec2(i + v.x() * 0.5 * k, v.y() * 0.5 * k)});
      records.push_back({test::raw_track("walker-" + std::to_string(i), samples), {}, {}});
    }
    const fs::path path = dir_ / "raw.jsonl";
    write_raw_tracks(path, records);
    return path;
  }

  fs::path dir_;
};

TEST_F(HarnessTest, CvOnModelMatchedDataIsExact) {
  const fs::path raw = write_cv_tracks(40);
  ASSERT_EQ(run_cli({"build-dataset", "--input", raw.string(), "--out", (dir_ / "ds").string()}).status, 0);
  EXPECT_TRUE(fs::exists(dir_ / "ds" / "full.jsonl"));
  EXPECT_TRUE(fs::exists(dir_ / "ds" / "motion_changes.jsonl"));
  EXPECT_TRUE(fs::exists(dir_ / "ds" / "config.ini"));

  const Result r = run_cli({"evaluate", "--input", (dir_ / "ds" / "full.jsonl").string(),
                            "--predictor", "cv", "--out", (dir_ / "cv").string()});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto report = nlohmann::json::parse(slurp(dir_ / "cv" / "report.json"));
  const auto& rows = report["table"]["rows"];
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0]["metric"], "RMS");
  for (const auto& v : rows[0]["values"]) EXPECT_LT(v.get<double>(), 1e-9);
  EXPECT_EQ(report["config"]["task"]["history_s"], "1");
}

TEST_F(HarnessTest, EvaluateIsByteIdentical) {
  ASSERT_EQ(run_cli({"synth-gen", "--n", "120", "--out", (dir_ / "syn").string()}).status, 0);
  // Same config twice; the first outputs are kept aside before the rerun.
  std::string report, predictions;
  for (int pass = 0; pass < 2; ++pass) {
    const Result r = run_cli({"evaluate", "--input", (dir_ / "syn" / "instances.jsonl").string(),
                              "--predictor", "ensemble", "--out", (dir_ / "a").string()});
    ASSERT_EQ(r.status, 0) << r.err;
    if (pass == 0) {
      report = slurp(dir_ / "a" / "report.json");
      predictions = slurp(dir_ / "a" / "predictions.jsonl");
    }
  }
  EXPECT_EQ(report, slurp(dir_ / "a" / "report.json"));
  EXPECT_EQ(predictions, slurp(dir_ / "a" / "predictions.jsonl"));
}

TEST_F(HarnessTest, ReportMergesPredictors) {
  ASSERT_EQ(run_cli({"synth-gen", "--n", "120", "--out", (dir_ / "syn").string()}).status, 0);
  std::vector<std::string> args{"report", "--out", (dir_ / "table").string()};
  for (const char* p : {"cv", "da", "ensemble"}) {
    const fs::path out = dir_ / p;
    ASSERT_EQ(run_cli({"evaluate", "--input", (dir_ / "syn" / "instances.jsonl").string(),
                       "--predictor", p, "--out", out.string()})
                  .status,
              0);
    args.push_back("--input");
    args.push_back((out / "report.json").string());
  }
  const Result r = run_cli(args);
  ASSERT_EQ(r.status, 0) << r.err;
  const auto doc = nlohmann::json::parse(slurp(dir_ / "table" / "table.json"));
  ASSERT_EQ(doc["tables"].size(), 1u);
  const auto& rows = doc["tables"][0]["rows"];
  std::vector<std::string> order;
  for (const auto& row : rows) order.push_back(row["metric"].get<std::string>() + "/" +
                                               row["predictor"].get<std::string>());
  EXPECT_EQ(order, (std::vector<std::string>{"RMS/cv", "RMS/da", "predRMS/ensemble",
                                             "minADE/ensemble", "minFDE/ensemble",
                                             "expRMS/ensemble", "NLL/ensemble"}));
  EXPECT_NE(r.out.find("3 s"), std::string::npos);
}

TEST_F(HarnessTest, ExternalPredictionsValidatedBeforeScoring) {
  ASSERT_EQ(run_cli({"synth-gen", "--n", "120", "--out", (dir_ / "syn").string()}).status, 0);
  const fs::path instances = dir_ / "syn" / "instances.jsonl";
  ASSERT_EQ(run_cli({"evaluate", "--input", instances.string(), "--predictor", "ensemble",
                     "--out", (dir_ / "ens").string()})
                .status,
            0);
  // Re-scoring the harness's own predictions reproduces its table.
  const fs::path preds = dir_ / "ens" / "predictions.jsonl";
  const Result ok = run_cli({"evaluate", "--input", instances.string(), "--predictions",
                             preds.string(), "--out", (dir_ / "ext").string()});
  ASSERT_EQ(ok.status, 0) << ok.err;
  const auto a = nlohmann::json::parse(slurp(dir_ / "ens" / "report.json"))["table"]["rows"];
  const auto b = nlohmann::json::parse(slurp(dir_ / "ext" / "report.json"))["table"]["rows"];
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i]["values"], b[i]["values"]);

  // Drop one instance's prediction: the run fails and leaves no outputs.
  auto predictions = read_predictions(preds);
  predictions.pop_back();
  const fs::path partial = dir_ / "partial.jsonl";
  write_predictions(partial, predictions);
  const fs::path out = dir_ / "bad";
  const Result bad = run_cli({"evaluate", "--input", instances.string(), "--predictions",
                              partial.string(), "--out", out.string()});
  EXPECT_NE(bad.status, 0);
  EXPECT_EQ(std::count(bad.err.begin(), bad.err.end(), '\n'), 1);
  const auto err = nlohmann::json::parse(bad.err);
  EXPECT_EQ(err["error"], "InvalidPredictions");
  EXPECT_FALSE(fs::exists(out / "report.json"));
  if (fs::exists(out)) EXPECT_TRUE(fs::is_empty(out));
}

TEST_F(HarnessTest, LeakageAuditCausalNeverLeads) {
  ASSERT_EQ(run_cli({"synth-gen", "--n", "50", "--out", (dir_ / "syn").string()}).status, 0);
  const fs::path raw = dir_ / "syn" / "raw_tracks.jsonl";
  ASSERT_EQ(run_cli({"leakage-audit", "--input", raw.string(), "--resample", "causal",
                     "--out", (dir_ / "hold").string()})
                .status,
            0);
  const auto hold = nlohmann::json::parse(slurp(dir_ / "hold" / "leakage.json"));
  EXPECT_EQ(hold["n_positive_lead"], 0);
  EXPECT_EQ(hold["resample"], "causal");
  ASSERT_EQ(run_cli({"leakage-audit", "--input", raw.string(), "--out",
                     (dir_ / "lin").string()})
                .status,
            0);
  const auto lin = nlohmann::json::parse(slurp(dir_ / "lin" / "leakage.json"));
  EXPECT_GT(lin["n_positive_lead"].get<int>(), 0);
}

TEST_F(HarnessTest, UsageErrors) {
  const Result none = run_cli({});
  EXPECT_EQ(none.status, 2);
  EXPECT_EQ(nlohmann::json::parse(none.err)["error"], "InvalidArgument");
  const Result both = run_cli({"evaluate", "--predictor", "cv", "--predictions", "x"});
  EXPECT_EQ(both.status, 2);
  const Result missing = run_cli({"evaluate", "--input", (dir_ / "nope.jsonl").string()});
  EXPECT_EQ(missing.status, 1);
  EXPECT_EQ(nlohmann::json::parse(missing.err)["error"], "Io");
  const Result help = run_cli({"--help"});
  EXPECT_EQ(help.status, 0);
  EXPECT_NE(help.out.find("evaluate"), std::string::npos);
}

TEST_F(HarnessTest, ConfigSidecarReloads) {
  ASSERT_EQ(run_cli({"synth-gen", "--n", "5", "--seed", "9", "--out", (dir_ / "syn").string()}).status, 0);
  const RunConfig c = load_run_config(dir_ / "syn" / "config.ini");
  EXPECT_EQ(c.synth.seed, 9u);
  EXPECT_EQ(c.synth.n, 5u);
  EXPECT_EQ(to_ini(c), slurp(dir_ / "syn" / "config.ini"));
}

}  // namespace
}  // namespace pedbench

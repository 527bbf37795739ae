/*
 * Copyright 2026 The susp Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "helpers.hpp"
#include "susp/pipeline.hpp"

namespace {

using namespace susp;
using namespace susp::pipeline;
using testutil::code_of;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PipelineConfig tiny_config(const std::filesystem::path& root, const std::string& work) {
  const auto data = (root / "data").string();
  const std::vector<std::string> overrides{
      "paths.synth_out=" + data,
      "paths.tweets=" + data + "/tweets.jsonl",
      "paths.snapshots=" + data + "/snapshots.jsonl",
      "paths.labels=" + data + "/labels.csv",
      "paths.workdir=" + (root / work).string(),
  };
  return PipelineConfig::parse(R"({
    "seed": 5,
    "synth": {"normal_users": 40, "suspended_users": 40},
    "text": {"encoder_dim": 64, "clustering_dim": 4, "feature_dim": 8},
    "graph": {"dim": 8, "epochs": 2, "negatives": 5, "eval_negatives": 10, "batch_size": 64},
    "model": {"k_folds": 3, "gbdt": {"rounds": 10, "max_depth": 3}},
    "explain": {"background_rows": 10, "samples": 8, "instances": 4}
  })", overrides);
}

TEST(Config, DefaultsRoundTrip) {
  const auto c = PipelineConfig::parse("{}");
  EXPECT_EQ(c.window_days, 21);
  EXPECT_EQ(c.cluster.tau, 0.9);
  EXPECT_EQ(PipelineConfig::parse(c.to_json()).to_json(), c.to_json());
  EXPECT_EQ(model_targets(c).back(), "combination");
  EXPECT_EQ(model_targets(c).size(), 6u);
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_EQ(code_of([] { PipelineConfig::parse(R"({"tua": 0.5})"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { PipelineConfig::parse(R"({"cluster": {"tua": 0.5}})"); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { PipelineConfig::parse(R"({"cluster": {"tau": 0}})"); }),
            ErrorCode::kInvalidArgument);
}

TEST(Config, OverridesWinAndHashIgnoresPaths) {
  const std::vector<std::string> o{"cluster.tau=0.8", "families=[\"profile\"]", "paths.workdir=/x"};
  const auto c = PipelineConfig::parse(R"({"cluster": {"tau": 0.95}})", o);
  EXPECT_EQ(c.cluster.tau, 0.8);
  ASSERT_EQ(c.families.size(), 1u);
  EXPECT_EQ(c.paths.workdir, "/x");
  const std::vector<std::string> o2{"cluster.tau=0.8", "families=[\"profile\"]", "threads=4"};
  EXPECT_EQ(PipelineConfig::parse("{}", o2).hash(), c.hash());
  const std::vector<std::string> o3{"cluster.tau=0.7", "families=[\"profile\"]"};
  EXPECT_NE(PipelineConfig::parse("{}", o3).hash(), c.hash());
  const std::vector<std::string> bad{"cluster.nope=1"};
  EXPECT_EQ(code_of([&] { PipelineConfig::parse("{}", bad); }), ErrorCode::kInvalidArgument);
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code(ErrorCode::kInvalidArgument), 2);
  EXPECT_EQ(exit_code(ErrorCode::kMissingArtifact), 3);
  const auto j = nlohmann::json::parse(error_line("MissingArtifact", "evaluate", "no model"));
  EXPECT_EQ(j["error"], "MissingArtifact");
  EXPECT_EQ(j["stage"], "evaluate");
}

TEST(PipelineRun, EvaluateWithoutModelIsMissingArtifact) {
  testutil::TempDir dir;
  Pipeline p(tiny_config(dir.path(), "empty"));
  EXPECT_EQ(code_of([&] { p.evaluate(model::SplitTag::kSecondTest); }), ErrorCode::kMissingArtifact);
}

TEST(PipelineRun, RerunGivesIdenticalManifestsAndReport) {
  testutil::TempDir dir;
  Pipeline gen(tiny_config(dir.path(), "w0"));
  gen.synth();
  Pipeline a(tiny_config(dir.path(), "wa"));
  Pipeline b(tiny_config(dir.path(), "wb"));
  a.run_all();
  b.run_all();
  for (Stage s : {Stage::kIngest, Stage::kGraph, Stage::kFeatures, Stage::kCluster, Stage::kTrain,
                  Stage::kExplain, Stage::kReport}) {
    const auto ma = a.manifest_path(s);
    ASSERT_TRUE(std::filesystem::exists(ma)) << ma;
    EXPECT_EQ(slurp(ma), slurp(b.manifest_path(s))) << to_string(s);
  }
  const auto report = nlohmann::json::parse(slurp(a.workdir() / "report.json"));
  EXPECT_EQ(report["config_hash"], a.config().hash());
  EXPECT_TRUE(report["performance"].contains("combination"));
  EXPECT_TRUE(report["performance"]["combination"].contains("second_test"));
  const auto manifest = nlohmann::json::parse(slurp(a.manifest_path(Stage::kTrain)));
  EXPECT_EQ(manifest["config_hash"], a.config().hash());
  EXPECT_FALSE(manifest["outputs"].empty());
}

}  // namespace

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

#ifndef SUSP_PIPELINE_HPP_
#define SUSP_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "susp/common.hpp"
#include "susp/feature_matrix.hpp"
#include "susp/model.hpp"
#include "susp/synth.hpp"

namespace susp::pipeline {

struct Paths {
  std::filesystem::path tweets;
  std::filesystem::path snapshots;
  std::filesystem::path labels;
  std::filesystem::path embeddings;       // optional precomputed post vectors (EMB1)
  std::filesystem::path toxicity_scores;  // optional CSV tweet_id,score
  std::filesystem::path synth_out;        // corpus directory written by synth
  std::filesystem::path workdir = "work";
};

struct TextConfig {
  std::string provider = "hashing";  // or "precomputed"
  std::size_t encoder_dim = 768;
  std::size_t clustering_dim = 20;
  std::size_t feature_dim = 384;
  std::size_t pca_max_rows = 20000;
};

struct ClusterConfig {
  double tau = 0.9;
  std::size_t sample_n = 10;
  std::vector<std::string> keywords = {"crypto", "nft", "donation"};
  double toxicity_threshold = 0.5;
  std::size_t digest_top = 50;
};

struct GraphConfig {
  std::size_t dim = 150;
  int epochs = 10;
  double learning_rate = 0.1;
  std::size_t negatives = 100;
  std::size_t batch_size = 1024;
  double holdout = 0.05;
  std::size_t eval_negatives = 100;
  bool filtered = true;
  bool hogwild = false;  // lock-free parallel updates; not reproducible
  std::vector<std::size_t> dims_sweep;  // extra dims evaluated for the graph report
};

struct ModelConfig {
  model::ModelKind kind = model::ModelKind::kGbdt;
  model::Hyperparams params;
  int k_folds = 5;
  double selection_threshold = 0.001;
  double test_fraction = 0.2;
};

struct ExplainConfig {
  std::size_t background_rows = 100;
  std::size_t samples = 64;
  std::size_t instances = 200;
  std::vector<std::string> targets = {"combination", "profile"};
};

struct PipelineConfig {
  Paths paths;
  Epoch window_start = 1645574400;  // 2022-02-23T00:00:00Z
  int window_days = 21;
  std::vector<model::Family> families = {model::kAllFamilies.begin(), model::kAllFamilies.end()};
  bool balance = true;
  std::uint64_t seed = 42;
  int threads = 1;
  TextConfig text;
  ClusterConfig cluster;
  GraphConfig graph;
  ModelConfig model;
  ExplainConfig explain;
  synth::GeneratorConfig synth;

  // JSON object; missing keys keep their defaults, unknown keys are
  // rejected. Each override is "dotted.key=value" with value parsed as JSON
  // when possible and as a string otherwise. Throws kInvalidArgument.
  static PipelineConfig parse(std::string_view json_text,
                              std::span<const std::string> overrides = {});
  static PipelineConfig load(const std::filesystem::path& path,
                             std::span<const std::string> overrides = {});

  std::string to_json() const;
  // SHA-256 of the canonical JSON without the paths section.
  std::string hash() const;
};

// Ordered model targets: enabled families then "combination".
std::vector<std::string> model_targets(const PipelineConfig& c);

enum class Stage { kIngest, kGraph, kFeatures, kCluster, kTrain, kEvaluate, kExplain, kReport, kSynth };

std::string_view to_string(Stage s);

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);

  void ingest();
  void graph();
  void features();
  void cluster();
  void train();
  void evaluate(model::SplitTag split);
  void explain();
  void report();
  void synth();
  // ingest, graph, features, cluster, train, evaluate x3, explain, report.
  void run_all();

  const PipelineConfig& config() const { return config_; }
  std::filesystem::path workdir() const { return config_.paths.workdir; }
  std::filesystem::path manifest_path(Stage s) const;

  // Progress lines ("stage: message"); silent by default.
  void set_logger(std::function<void(std::string_view)> log) { log_ = std::move(log); }

 private:
  PipelineConfig config_;
  std::function<void(std::string_view)> log_;
};

// 2 usage, 3 data, 4 internal.
int exit_code(ErrorCode code);
// {"error":<code>,"stage":<stage>,"message":<message>}
std::string error_line(std::string_view code, std::string_view stage, std::string_view message);

}  // namespace susp::pipeline

#endif  // SUSP_PIPELINE_HPP_

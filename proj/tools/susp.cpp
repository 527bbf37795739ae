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

// Command-line front end for the pipeline stages.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "susp/pipeline.hpp"

namespace {

using susp::pipeline::Pipeline;
using susp::pipeline::PipelineConfig;

struct Options {
  std::string config;
  std::string workdir;
  std::string seed;
  int threads = 0;
  std::vector<std::string> overrides;
  bool quiet = false;
  std::string split = "test";
};

PipelineConfig load_config(const Options& o) {
  std::vector<std::string> ov = o.overrides;
  if (!o.workdir.empty()) ov.push_back("paths.workdir=" + o.workdir);
  if (!o.seed.empty()) ov.push_back("seed=" + o.seed);
  if (o.threads > 0) ov.push_back("threads=" + std::to_string(o.threads));
  if (o.config.empty()) return PipelineConfig::parse("", ov);
  return PipelineConfig::load(o.config, ov);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Account suspension analysis pipeline"};
  app.require_subcommand(1);
  Options o;
  app.add_option("-c,--config", o.config, "JSON config file");
  app.add_option("-w,--workdir", o.workdir, "Artifact directory (overrides paths.workdir)");
  app.add_option("--seed", o.seed, "Root seed (overrides seed)");
  app.add_option("-j,--threads", o.threads, "Thread cap per stage")->check(CLI::PositiveNumber);
  app.add_option("--set", o.overrides, "Config override key=value (repeatable)");
  app.add_flag("-q,--quiet", o.quiet, "No progress output");

  const std::vector<std::pair<std::string, std::string>> stages = {
      {"ingest", "Load tweets, snapshots and labels into the corpus store"},
      {"graph", "Build interaction graphs and train node embeddings"},
      {"features", "Extract per-user feature matrices"},
      {"cluster", "Cluster suspended-user posts, find wallets and keywords"},
      {"train", "Train per-family and combination classifiers"},
      {"explain", "Shapley explanations for trained models"},
      {"report", "Combine stage outputs into report.json"},
      {"synth", "Write a synthetic corpus to paths.synth_out"},
      {"run", "Run every analysis stage in order"},
      {"config", "Print the effective config as JSON"}};
  for (const auto& [name, help] : stages) app.add_subcommand(name, help);
  auto* eval = app.add_subcommand("evaluate", "Score models on one split");
  eval->add_option("--split", o.split, "validation | test | second_test")
      ->check(CLI::IsMember({"validation", "test", "second_test"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    Pipeline p(load_config(o));
    if (!o.quiet) {
      p.set_logger([](std::string_view line) { std::cerr << line << '\n'; });
    }
    if (stage == "ingest") p.ingest();
    else if (stage == "graph") p.graph();
    else if (stage == "features") p.features();
    else if (stage == "cluster") p.cluster();
    else if (stage == "train") p.train();
    else if (stage == "evaluate") p.evaluate(susp::model::parse_split_tag(o.split));
    else if (stage == "explain") p.explain();
    else if (stage == "report") p.report();
    else if (stage == "synth") p.synth();
    else if (stage == "run") p.run_all();
    else std::cout << p.config().to_json() << '\n';
  } catch (const susp::Error& e) {
    std::cerr << susp::pipeline::error_line(susp::to_string(e.code()), stage, e.what()) << '\n';
    return susp::pipeline::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << susp::pipeline::error_line("Internal", stage, e.what()) << '\n';
    return 4;
  }
  return 0;
}

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

#include <benchmark/benchmark.h>

#include "susp/graph.hpp"
#include "susp/random.hpp"

namespace {

using namespace susp;

// Preferential attachment on 5000 users with mixed relations.
graph::RelationGraph social_graph() {
  Rng rng(4);
  graph::RelationGraph g;
  std::vector<std::uint32_t> targets{0};
  for (std::uint32_t u = 1; u < 5000; ++u) {
    for (int k = 0; k < 6; ++k) {
      const auto d = targets[rng.uniform_index(targets.size())];
      g.add_edge(std::to_string(u), graph::kAllRelations[rng.uniform_index(3)], std::to_string(d));
      targets.push_back(d);
    }
    targets.push_back(u);
  }
  return g;
}

void BM_GraphEpoch(benchmark::State& state) {
  const auto g = social_graph();
  graph::TrainOptions o;
  o.dim = static_cast<std::size_t>(state.range(0));
  o.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(graph::train_embeddings(g, o).epoch_loss.back());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.total_weight()));
}
BENCHMARK(BM_GraphEpoch)->Arg(50)->Arg(150)->Unit(benchmark::kMillisecond);

void BM_GraphEvaluate(benchmark::State& state) {
  const auto g = social_graph();
  const auto split = graph::split_edges(g, 0.05, 1);
  graph::TrainOptions o;
  o.dim = 50;
  o.epochs = 1;
  const auto emb = graph::train_embeddings(split.train, o).embeddings;
  graph::EvalOptions e;
  e.filter = &g;
  for (auto _ : state) benchmark::DoNotOptimize(graph::evaluate(emb, split.held_out, e).auc);
}
BENCHMARK(BM_GraphEvaluate)->Unit(benchmark::kMillisecond);

}  // namespace

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

#include <cmath>

#include "susp/clustering.hpp"
#include "susp/random.hpp"
#include "susp/wallets.hpp"

namespace {

using namespace susp;

// Unit vectors around a few hundred centres, like reduced post embeddings.
embedding::EmbeddingMatrix posts(std::size_t n, std::size_t d) {
  Rng rng(1);
  std::vector<std::vector<double>> centres(300, std::vector<double>(d));
  for (auto& c : centres) for (auto& v : c) v = rng.normal();
  embedding::EmbeddingMatrix m(d);
  std::vector<double> row(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = centres[rng.uniform_index(centres.size())];
    double norm = 0;
    for (std::size_t j = 0; j < d; ++j) {
      row[j] = c[j] + 0.3 * rng.normal();
      norm += row[j] * row[j];
    }
    for (auto& v : row) v /= std::sqrt(norm);
    m.add_row("p" + std::to_string(i), row);
  }
  return m;
}

void BM_ClusterBucket(benchmark::State& state) {
  const auto m = posts(static_cast<std::size_t>(state.range(0)), 20);
  for (auto _ : state) {
    const auto a = clustering::cluster_cosine(m, 0.9, clustering::LeaderIndex::kBucket);
    benchmark::DoNotOptimize(a.clusters.size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ClusterBucket)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_ClusterNaive(benchmark::State& state) {
  const auto m = posts(static_cast<std::size_t>(state.range(0)), 20);
  for (auto _ : state) {
    const auto a = clustering::cluster_cosine(m, 0.9, clustering::LeaderIndex::kNaive);
    benchmark::DoNotOptimize(a.clusters.size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ClusterNaive)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_WalletScan(benchmark::State& state) {
  std::vector<clustering::WalletDocument> docs;
  for (int i = 0; i < 1000; ++i) {
    docs.push_back({std::to_string(i), "u",
                    "giveaway! send to 1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa or 0x52908400098527886E0F7030069857D2E4169EE7 #crypto"});
  }
  for (auto _ : state) benchmark::DoNotOptimize(clustering::extract_wallets(docs).size());
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_WalletScan)->Unit(benchmark::kMillisecond);

}  // namespace

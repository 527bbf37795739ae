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

#include "susp/random.hpp"
#include "susp/text_embedding.hpp"

namespace {

using namespace susp;

void BM_HashingEncoder(benchmark::State& state) {
  const embedding::HashingEncoder enc(768);
  const std::string text =
      "Join the biggest giveaway of the year, claim your tokens now at https://t.co/x #crypto #nft";
  for (auto _ : state) benchmark::DoNotOptimize(enc.encode(text).data());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_HashingEncoder);

embedding::EmbeddingMatrix random_matrix(std::size_t n, std::size_t d) {
  Rng rng(2);
  embedding::EmbeddingMatrix m(d);
  std::vector<double> row(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) row[j] = rng.normal() / (1.0 + 0.05 * static_cast<double>(j));
    m.add_row("r" + std::to_string(i), row);
  }
  return m;
}

void BM_PcaFit(benchmark::State& state) {
  const auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 768);
  for (auto _ : state) {
    const auto p = embedding::pca_fit(m, 20);
    benchmark::DoNotOptimize(p.explained_variance.data());
  }
}
BENCHMARK(BM_PcaFit)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_PcaTransform(benchmark::State& state) {
  const auto m = random_matrix(10000, 768);
  const auto p = embedding::pca_fit(m, 20);
  for (auto _ : state) benchmark::DoNotOptimize(embedding::pca_transform(p, m).rows());
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_PcaTransform)->Unit(benchmark::kMillisecond);

}  // namespace

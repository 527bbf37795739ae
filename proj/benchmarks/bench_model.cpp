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

#include "susp/explain.hpp"
#include "susp/model.hpp"
#include "susp/random.hpp"

namespace {

using namespace susp;

model::FeatureMatrix matrix(std::size_t n, std::size_t m) {
  Rng rng(3);
  model::FeatureMatrix x;
  for (std::size_t j = 0; j < m; ++j) x.names.push_back("f" + std::to_string(j));
  x.families.assign(m, model::Family::kProfile);
  std::vector<double> row(m);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(i % 2);
    for (std::size_t j = 0; j < m; ++j) row[j] = rng.normal() + (j % 10 == 0 ? 0.5 * y : 0.0);
    x.add_row("u" + std::to_string(i), row);
    x.labels.push_back(y);
  }
  return x;
}

void BM_GbdtTrain(benchmark::State& state) {
  const auto x = matrix(3200, static_cast<std::size_t>(state.range(0)));
  model::Hyperparams p;
  for (auto _ : state) {
    const auto m = model::train(x, model::ModelKind::kGbdt, p, 1);
    benchmark::DoNotOptimize(m.trees.size());
  }
}
BENCHMARK(BM_GbdtTrain)->Arg(50)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_LogisticTrain(benchmark::State& state) {
  const auto x = matrix(3200, 400);
  model::Hyperparams p;
  for (auto _ : state) benchmark::DoNotOptimize(model::train(x, model::ModelKind::kLogistic, p, 1).weights.data());
}
BENCHMARK(BM_LogisticTrain)->Unit(benchmark::kMillisecond);

struct Explainable {
  model::TrainedModel model;
  explain::Background background;
  std::vector<double> instance;
};

Explainable explainable(std::size_t m) {
  const auto x = matrix(1000, m);
  model::Hyperparams p;
  p.gbdt.rounds = 100;
  Explainable e{model::train(x, model::ModelKind::kGbdt, p, 1), {}, {}};
  e.background = explain::sample_background(e.model, x, 100, 2);
  const auto r = x.row(0);
  e.instance.assign(r.begin(), r.end());
  return e;
}

void BM_ShapleyExact(benchmark::State& state) {
  const auto e = explainable(static_cast<std::size_t>(state.range(0)));
  const auto f = explain::margin_function(e.model);
  for (auto _ : state) benchmark::DoNotOptimize(explain::shapley_exact(f, e.instance, e.background).phi.data());
}
BENCHMARK(BM_ShapleyExact)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_ShapleySampled(benchmark::State& state) {
  const auto e = explainable(100);
  const auto f = explain::margin_function(e.model);
  for (auto _ : state) {
    benchmark::DoNotOptimize(explain::shapley_sampled(f, e.instance, e.background, 64, 1).phi.data());
  }
}
BENCHMARK(BM_ShapleySampled)->Unit(benchmark::kMillisecond);

}  // namespace

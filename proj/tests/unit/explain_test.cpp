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

#include <algorithm>
#include <numeric>

#include "helpers.hpp"
#include "oracles.hpp"
#include "susp/common.hpp"
#include "susp/explain.hpp"
#include "susp/random.hpp"

namespace {

using namespace susp;
using namespace susp::explain;
using testutil::code_of;

Background make_background(const oracle::Matrix& rows) {
  Background b;
  b.cols = rows.front().size();
  for (const auto& r : rows) b.add_row(r);
  return b;
}

oracle::Matrix random_matrix(Rng& rng, std::size_t n, std::size_t m) {
  oracle::Matrix rows(n, std::vector<double>(m));
  for (auto& r : rows) for (auto& v : r) v = rng.normal();
  return rows;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Small nonlinear model with interactions and a threshold.
double tree_like(std::span<const double> x) {
  double out = x[0] > 0.2 ? 1.5 : -0.5;
  if (x[1] > 0.0) out += x[2] > -0.3 ? 2.0 : 0.25;
  return out + 0.3 * x[0] * x[2];
}

TEST(ShapleyExact, LinearModelClosedForm) {
  Rng rng(1);
  const std::vector<double> w{2.0, -1.0, 0.5, 3.0};
  const ModelFn f = [&](std::span<const double> x) {
    double s = 0.7;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
    return s;
  };
  const auto bg_rows = random_matrix(rng, 10, 4);
  const std::vector<double> x{1.0, 2.0, -1.0, 0.5};
  const auto e = shapley_exact(f, x, make_background(bg_rows));
  for (std::size_t i = 0; i < w.size(); ++i) {
    double mu = 0;
    for (const auto& r : bg_rows) mu += r[i];
    mu /= static_cast<double>(bg_rows.size());
    EXPECT_NEAR(e.phi[i], w[i] * (x[i] - mu), 1e-12);
  }
  EXPECT_NEAR(sum(e.phi) + e.base_value, f(x), 1e-9);
}

TEST(ShapleyExact, SymmetryAndNullPlayer) {
  const ModelFn f = [](std::span<const double> x) { return x[0] * x[1] + std::sin(x[0] + x[1]); };
  Rng rng(2);
  auto bg = random_matrix(rng, 6, 3);
  for (auto& r : bg) r[1] = r[0];  // symmetric background as well
  const std::vector<double> x{0.8, 0.8, 5.0};
  const auto e = shapley_exact(f, x, make_background(bg));
  EXPECT_NEAR(e.phi[0], e.phi[1], 1e-12);
  EXPECT_NEAR(e.phi[2], 0.0, 1e-12);
  EXPECT_NEAR(sum(e.phi) + e.base_value, e.output, 1e-9);
}

TEST(ShapleyExact, MatchesEnumerationOracles) {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto bg = random_matrix(rng, 7, 3);
    const auto x = random_matrix(rng, 1, 3).front();
    const auto e = shapley_exact(tree_like, x, make_background(bg));
    const oracle::Fn g = [](const std::vector<double>& v) { return tree_like(v); };
    const auto by_subsets = oracle::shapley_by_subsets(g, x, bg);
    const auto by_perms = oracle::shapley_by_permutations(g, x, bg);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_NEAR(e.phi[i], by_subsets[i], 1e-12);
      EXPECT_NEAR(e.phi[i], by_perms[i], 1e-12);
    }
  }
}

TEST(ShapleyExact, BackgroundOrderInvariant) {
  Rng rng(4);
  auto bg = random_matrix(rng, 8, 3);
  const std::vector<double> x{0.5, 0.5, 0.5};
  const auto a = shapley_exact(tree_like, x, make_background(bg));
  std::reverse(bg.begin(), bg.end());
  const auto b = shapley_exact(tree_like, x, make_background(bg));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a.phi[i], b.phi[i], 1e-12);
}

TEST(ShapleyExact, Errors) {
  const ModelFn f = [](std::span<const double>) { return 0.0; };
  Background empty;
  empty.cols = 2;
  const std::vector<double> x2{1, 2};
  EXPECT_EQ(code_of([&] { shapley_exact(f, x2, empty); }), ErrorCode::kInvalidArgument);
  Background wide;
  wide.cols = 16;
  wide.add_row(std::vector<double>(16, 0.0));
  const std::vector<double> x16(16, 1.0);
  EXPECT_EQ(code_of([&] { shapley_exact(f, x16, wide); }), ErrorCode::kTooManyFeatures);
}

TEST(ShapleySampled, ConvergesTowardExact) {
  const ModelFn f = [](std::span<const double> x) {
    return tree_like(x) + 0.4 * x[3] * x[4] - (x[4] > 1.0 ? 1.0 : 0.0);
  };
  double err_small = 0, err_large = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Rng rng(seed);
    const auto bg = make_background(random_matrix(rng, 6, 5));
    const auto x = random_matrix(rng, 1, 5).front();
    const auto exact = shapley_exact(f, x, bg);
    const auto small = shapley_sampled(f, x, bg, 1000, seed);
    const auto large = shapley_sampled(f, x, bg, 10000, seed);
    for (std::size_t i = 0; i < 5; ++i) {
      err_small = std::max(err_small, std::abs(small.phi[i] - exact.phi[i]));
      err_large = std::max(err_large, std::abs(large.phi[i] - exact.phi[i]));
    }
    EXPECT_NEAR(sum(large.phi) + large.base_value, large.output, 1e-9);
  }
  EXPECT_LT(err_large, err_small);
  EXPECT_LT(err_large, 0.1);
}

TEST(ShapleySampled, NullPlayerAndDeterminism) {
  const ModelFn f = [](std::span<const double> x) { return x[0] * x[1]; };
  Rng rng(5);
  const auto bg = make_background(random_matrix(rng, 5, 3));
  const std::vector<double> x{1.0, -2.0, 9.0};
  const auto a = shapley_sampled(f, x, bg, 200, 11);
  const auto b = shapley_sampled(f, x, bg, 200, 11);
  EXPECT_EQ(a.phi, b.phi);
  EXPECT_NEAR(a.phi[2], 0.0, 1e-9);
}

Explanation make_expl(std::shared_ptr<const std::vector<std::string>> names,
                      std::vector<double> phi) {
  Explanation e;
  e.features = std::move(names);
  e.values.assign(phi.size(), 1.0);
  e.phi = std::move(phi);
  return e;
}

TEST(ImpactSummary, SingleExplanationRanksByAbsPhi) {
  auto names = std::make_shared<const std::vector<std::string>>(std::vector<std::string>{"a", "b", "c"});
  const std::vector<Explanation> ex{make_expl(names, {0.1, -0.5, 0.3})};
  const auto s = impact_summary(ex);
  ASSERT_EQ(s.ranking.size(), 3u);
  EXPECT_EQ(s.ranking[0].feature, "b");
  EXPECT_EQ(s.ranking[1].feature, "c");
  EXPECT_EQ(s.ranking[2].feature, "a");
  EXPECT_EQ(s.ranking[0].rank, 1u);
  EXPECT_DOUBLE_EQ(s.mean_abs_phi[1], 0.5);
  EXPECT_EQ(s.scatter[1].front(), (std::pair<double, double>{1.0, -0.5}));
}

TEST(ImpactSummary, AllZeroUsesNameOrder) {
  auto names = std::make_shared<const std::vector<std::string>>(std::vector<std::string>{"z", "m", "a"});
  const std::vector<Explanation> ex{make_expl(names, {0, 0, 0}), make_expl(names, {0, 0, 0})};
  const auto s = impact_summary(ex);
  EXPECT_EQ(s.ranking[0].feature, "a");
  EXPECT_EQ(s.ranking[1].feature, "m");
  EXPECT_EQ(s.ranking[2].feature, "z");
  for (double v : s.mean_abs_phi) EXPECT_EQ(v, 0.0);
}

TEST(ImpactSummary, Errors) {
  auto a = std::make_shared<const std::vector<std::string>>(std::vector<std::string>{"a"});
  auto b = std::make_shared<const std::vector<std::string>>(std::vector<std::string>{"b"});
  const std::vector<Explanation> mixed{make_expl(a, {1}), make_expl(b, {1})};
  EXPECT_EQ(code_of([&] { impact_summary(mixed); }), ErrorCode::kSchemaMismatch);
  EXPECT_EQ(code_of([&] { impact_summary({}); }), ErrorCode::kInvalidArgument);
}

TEST(ExplainMatrix, PlantedFeatureRankedFirst) {
  Rng rng(6);
  model::FeatureMatrix m;
  m.names = {"noise_a", "cause", "noise_b", "noise_c"};
  m.families.assign(4, model::Family::kProfile);
  for (int i = 0; i < 400; ++i) {
    const int y = i % 2;
    m.add_row("u" + std::to_string(i),
              std::vector<double>{rng.normal(), y + 0.2 * rng.normal(), rng.normal(), rng.normal()});
    m.labels.push_back(y);
  }
  model::Hyperparams p;
  p.gbdt.rounds = 30;
  p.gbdt.max_depth = 3;
  const auto model = model::train(m, model::ModelKind::kGbdt, p, 1);
  ExplainOptions o;
  o.background_rows = 50;
  o.seed = 2;
  const auto x = m.select_rows(std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  const auto ex = explain_matrix(model, x, m, o);
  ASSERT_EQ(ex.size(), 10u);
  EXPECT_EQ(impact_summary(ex).ranking.front().feature, "cause");
  for (const auto& e : ex) EXPECT_NEAR(sum(e.phi) + e.base_value, e.output, 1e-9);

  o.force_sampled = true;
  o.samples = 200;
  const auto sampled = explain_matrix(model, x, m, o);
  EXPECT_EQ(impact_summary(sampled).ranking.front().feature, "cause");
  EXPECT_EQ(sampled.front().phi, explain_matrix(model, x, m, o).front().phi);
}

TEST(ExplainMatrix, CsvOutputs) {
  testutil::TempDir dir;
  auto names = std::make_shared<const std::vector<std::string>>(std::vector<std::string>{"a", "b"});
  auto e = make_expl(names, {0.25, -1});
  e.id = "u1";
  const std::vector<Explanation> ex{e};
  write_explanations_csv(dir / "e.csv", ex);
  write_summary_csv(dir / "s.csv", impact_summary(ex));
  EXPECT_GT(std::filesystem::file_size(dir / "e.csv"), 0u);
  EXPECT_GT(std::filesystem::file_size(dir / "s.csv"), 0u);
}

}  // namespace

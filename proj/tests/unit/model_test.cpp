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
#include "susp/feature_matrix.hpp"
#include "susp/model.hpp"
#include "susp/random.hpp"

namespace {

using namespace susp;
using namespace susp::model;
using testutil::code_of;

// Column 0 carries the label plus noise, the others are pure noise, and the
// last is constant.
FeatureMatrix planted(std::size_t n, double signal_noise, std::uint64_t seed,
                      std::size_t noise_cols = 4) {
  Rng rng(seed);
  FeatureMatrix m;
  m.names.push_back("signal");
  for (std::size_t j = 0; j < noise_cols; ++j) m.names.push_back("noise" + std::to_string(j));
  m.names.push_back("constant");
  m.families.assign(m.names.size(), Family::kProfile);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(i % 2);
    std::vector<double> row{y + signal_noise * rng.normal()};
    for (std::size_t j = 0; j < noise_cols; ++j) row.push_back(rng.normal());
    row.push_back(3.0);
    m.add_row("u" + std::to_string(i), row);
    m.labels.push_back(y);
  }
  return m;
}

Hyperparams small_params() {
  Hyperparams p;
  p.gbdt.rounds = 30;
  p.gbdt.max_depth = 3;
  return p;
}

FeatureMatrix block(Family f, const std::vector<std::string>& names,
                    const std::vector<std::string>& users) {
  auto b = make_block(f, names);
  for (const auto& u : users) b.add_row(u, std::vector<double>(names.size(), 1.0));
  return b;
}

TEST(Assemble, WidthsAndFamilyOrder) {
  const std::vector<std::string> users{"a", "b"};
  const auto prof = block(Family::kProfile, {"p1", "p2"}, users);
  const auto text = block(Family::kTextual, {"t1"}, {"b", "a"});
  const auto act = block(Family::kActivity, {"a1", "a2", "a3"}, users);
  EXPECT_EQ(assemble({prof}).cols(), 2u);
  const auto all = assemble({text, prof, act});
  EXPECT_EQ(all.cols(), 6u);
  EXPECT_EQ(all.names, (std::vector<std::string>{"p1", "p2", "a1", "a2", "a3", "t1"}));
  EXPECT_EQ(all.user_ids, users);
}

TEST(Assemble, DisjointUsers) {
  const auto a = block(Family::kProfile, {"p"}, {"a", "b"});
  const auto b = block(Family::kActivity, {"x"}, {"c", "d"});
  EXPECT_EQ(code_of([&] { assemble({a, b}); }), ErrorCode::kUserSetMismatch);
}

TEST(Assemble, MissingSentinelPreserved) {
  auto a = make_block(Family::kProfile, {"p"});
  a.add_row("u", std::vector<double>{kMissing});
  const auto m = assemble({a});
  EXPECT_TRUE(m.missing(0, 0));
}

TEST(FeatureCsv, RoundTrip) {
  testutil::TempDir dir;
  auto m = planted(6, 0.1, 1);
  // The reader infers families from column names.
  m.names = {"account_age_days", "statuses_by_age", "followers_by_age",
             "friends_by_age", "listed_by_age", "favourites_by_age"};
  m.values[3] = kMissing;
  write_feature_csv(dir / "f.csv", m);
  const auto back = read_feature_csv(dir / "f.csv");
  EXPECT_EQ(back.names, m.names);
  EXPECT_EQ(back.user_ids, m.user_ids);
  EXPECT_EQ(back.labels, m.labels);
  EXPECT_EQ(back.families, m.families);
  EXPECT_TRUE(back.missing(0, 3));
  EXPECT_EQ(back.at(1, 0), m.at(1, 0));
}

TEST(Selection, PlantedSignalKeptConstantDropped) {
  const auto m = planted(400, 0.1, 2);
  const auto mask = select_features(m, 0.001, small_params(), 1);
  ASSERT_EQ(mask.size(), m.cols());
  EXPECT_TRUE(mask.front());
  EXPECT_FALSE(mask.back());
}

TEST(Selection, ThresholdZeroKeepsNonConstant) {
  const auto m = planted(200, 0.5, 3);
  const auto mask = select_features(m, 0.0, small_params(), 1);
  for (std::size_t j = 0; j + 1 < mask.size(); ++j) EXPECT_TRUE(mask[j]) << m.names[j];
  EXPECT_FALSE(mask.back());
}

TEST(Selection, FitRecordsMask) {
  const auto m = planted(300, 0.1, 4);
  const auto model = fit_with_selection(m, ModelKind::kGbdt, small_params(), 0.001, 5);
  const auto kept = static_cast<std::size_t>(
      std::count(model.selection_mask.begin(), model.selection_mask.end(), true));
  EXPECT_EQ(kept, model.schema.size());
  EXPECT_EQ(model.source_names, m.names);
  EXPECT_EQ(predict_proba(model, m), predict_proba(model, project(model, m)));
  EXPECT_EQ(model_from_json(model_to_json(model)).schema, model.schema);
}

TEST(Folds, TenSamplesFiveFolds) {
  const std::vector<int> labels{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  const auto folds = stratified_folds(labels, 5, 7);
  for (int f = 0; f < 5; ++f) {
    std::size_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (folds[i] != f) continue;
      ++(labels[i] == 1 ? pos : neg);
    }
    EXPECT_EQ(pos, 1u);
    EXPECT_EQ(neg, 1u);
  }
  EXPECT_EQ(folds, stratified_folds(labels, 5, 7));
}

TEST(Folds, ClassRatioWithinOne) {
  Rng rng(3);
  std::vector<int> labels(237);
  for (auto& l : labels) l = rng.bernoulli(0.3) ? 1 : 0;
  const auto folds = stratified_folds(labels, 5, 1);
  const auto total_pos = std::count(labels.begin(), labels.end(), 1);
  const auto total_neg = static_cast<long>(labels.size()) - total_pos;
  for (int f = 0; f < 5; ++f) {
    long pos = 0, neg = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (folds[i] == f) ++(labels[i] == 1 ? pos : neg);
    }
    EXPECT_LE(std::abs(5 * pos - total_pos), 5);
    EXPECT_LE(std::abs(5 * neg - total_neg), 5);
  }
}

TEST(Folds, TooFewSamples) {
  const std::vector<int> labels{0, 0, 0, 1};
  EXPECT_EQ(code_of([&] { stratified_folds(labels, 2, 1); }), ErrorCode::kTooFewSamples);
  EXPECT_EQ(code_of([&] { stratified_folds(labels, 1, 1); }), ErrorCode::kTooFewSamples);
}

TEST(Split, PerClassHoldOut) {
  std::vector<int> labels(100);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i < 40 ? 1 : 0;
  const auto [train_rows, test_rows] = stratified_split(labels, 0.2, 3);
  EXPECT_EQ(test_rows.size(), 20u);
  EXPECT_EQ(train_rows.size(), 80u);
  const auto pos = std::count_if(test_rows.begin(), test_rows.end(),
                                 [&](std::size_t r) { return labels[r] == 1; });
  EXPECT_EQ(pos, 8);
  EXPECT_TRUE(std::is_sorted(test_rows.begin(), test_rows.end()));
}

TEST(Gbdt, SeparableSingleFeature) {
  FeatureMatrix m;
  m.names = {"x"};
  m.families = {Family::kProfile};
  for (int i = 0; i < 40; ++i) {
    m.add_row("u" + std::to_string(i), std::vector<double>{static_cast<double>(i)});
    m.labels.push_back(i >= 20 ? 1 : 0);
  }
  for (ModelKind kind : {ModelKind::kGbdt, ModelKind::kLogistic}) {
    const auto model = train(m, kind, small_params(), 1);
    const auto p = predict_proba(model, m);
    for (std::size_t i = 0; i < p.size(); ++i) {
      EXPECT_EQ(p[i] > 0.5, m.labels[i] == 1) << to_string(kind) << " row " << i;
      EXPECT_GE(p[i], 0.0);
      EXPECT_LE(p[i], 1.0);
    }
    EXPECT_DOUBLE_EQ(evaluate(model, m, SplitTag::kTest).accuracy, 1.0);
  }
}

TEST(Gbdt, DegenerateLabels) {
  auto m = planted(10, 0.1, 1);
  std::fill(m.labels.begin(), m.labels.end(), 1);
  EXPECT_EQ(code_of([&] { train(m, ModelKind::kGbdt, small_params(), 1); }),
            ErrorCode::kDegenerateLabels);
}

TEST(Gbdt, DeterministicRefit) {
  const auto m = planted(200, 0.8, 6);
  const auto a = train(m, ModelKind::kGbdt, small_params(), 9);
  const auto b = train(m, ModelKind::kGbdt, small_params(), 9);
  EXPECT_EQ(model_to_json(a), model_to_json(b));
}

TEST(Gbdt, TrainingLossNonIncreasing) {
  const auto m = planted(300, 1.0, 8);
  const auto model = train(m, ModelKind::kGbdt, small_params(), 2);
  ASSERT_EQ(model.training_loss.size(), 30u);
  for (std::size_t i = 1; i < model.training_loss.size(); ++i) {
    EXPECT_LE(model.training_loss[i], model.training_loss[i - 1] + 1e-12) << "round " << i;
  }
}

TEST(Gbdt, JsonRoundTripPredictsIdentically) {
  testutil::TempDir dir;
  const auto m = planted(150, 0.7, 10);
  for (ModelKind kind : {ModelKind::kGbdt, ModelKind::kLogistic}) {
    const auto model = train(m, kind, small_params(), 3);
    write_model(dir / "m.json", model);
    EXPECT_EQ(predict_proba(read_model(dir / "m.json"), m), predict_proba(model, m));
  }
}

TEST(Predict, ImputesAllMissingRow) {
  const auto m = planted(100, 0.3, 11);
  const auto model = train(m, ModelKind::kGbdt, small_params(), 1);
  auto x = m.select_rows(std::vector<std::size_t>{0});
  std::fill(x.values.begin(), x.values.end(), kMissing);
  const auto p = predict_proba(model, x);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_TRUE(std::isfinite(p[0]));
  EXPECT_GE(p[0], 0.0);
  EXPECT_LE(p[0], 1.0);
}

TEST(Predict, WrongColumnOrder) {
  const auto m = planted(60, 0.3, 12);
  const auto model = train(m, ModelKind::kGbdt, small_params(), 1);
  std::vector<std::size_t> cols(m.cols());
  std::iota(cols.begin(), cols.end(), 0);
  std::swap(cols[0], cols[1]);
  const auto swapped = m.select_columns(cols);
  EXPECT_EQ(code_of([&] { predict_proba(model, swapped); }), ErrorCode::kSchemaMismatch);
}

TEST(EvaluateScores, PerfectScores) {
  const std::vector<double> s{0.9, 0.8, 0.3, 0.1};
  const std::vector<int> y{1, 1, 0, 0};
  const auto r = evaluate_scores(s, y, SplitTag::kTest);
  EXPECT_DOUBLE_EQ(r.f1, 1.0);
  EXPECT_DOUBLE_EQ(r.roc_auc, 1.0);
  EXPECT_DOUBLE_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.samples, 4u);
  EXPECT_EQ(r.positives, 2u);
}

TEST(EvaluateScores, ConstantScores) {
  const std::vector<double> s{0.2, 0.2, 0.2, 0.2};
  const std::vector<int> y{1, 0, 1, 0};
  const auto r = evaluate_scores(s, y, SplitTag::kValidation);
  EXPECT_DOUBLE_EQ(r.roc_auc, 0.5);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.5);
}

TEST(EvaluateScores, MatchesPairwiseOracleAndInvariances) {
  Rng rng(13);
  std::vector<double> s(300);
  std::vector<int> y(300);
  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < s.size(); ++i) {
    y[i] = rng.bernoulli(0.4) ? 1 : 0;
    s[i] = std::round((rng.uniform() + 0.2 * y[i]) * 20) / 25;
    (y[i] == 1 ? pos : neg).push_back(s[i]);
  }
  const auto r = evaluate_scores(s, y, SplitTag::kTest);
  EXPECT_NEAR(r.roc_auc, oracle::pairwise_auc(pos, neg), 1e-12);

  auto t = s;
  for (auto& v : t) v = std::exp(3 * v) - 7;
  EXPECT_NEAR(evaluate_scores(t, y, SplitTag::kTest).roc_auc, r.roc_auc, 1e-12);

  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<double> ps;
  std::vector<int> py;
  for (std::size_t i : order) {
    ps.push_back(s[i]);
    py.push_back(y[i]);
  }
  const auto p = evaluate_scores(ps, py, SplitTag::kTest);
  EXPECT_DOUBLE_EQ(p.roc_auc, r.roc_auc);
  EXPECT_DOUBLE_EQ(p.f1, r.f1);
  EXPECT_DOUBLE_EQ(p.accuracy, r.accuracy);
}

TEST(EvaluateScores, CurvesMonotone) {
  Rng rng(14);
  std::vector<double> s(100);
  std::vector<int> y(100);
  for (std::size_t i = 0; i < s.size(); ++i) {
    y[i] = static_cast<int>(i % 2);
    s[i] = rng.uniform();
  }
  const auto r = evaluate_scores(s, y, SplitTag::kTest);
  for (std::size_t i = 1; i < r.roc.size(); ++i) {
    EXPECT_LT(r.roc[i].threshold, r.roc[i - 1].threshold);
    EXPECT_GE(r.roc[i].x, r.roc[i - 1].x);
    EXPECT_GE(r.roc[i].y, r.roc[i - 1].y);
  }
  for (std::size_t i = 1; i < r.pr.size(); ++i) EXPECT_GE(r.pr[i].x, r.pr[i - 1].x);
  for (const auto& p : r.pr) {
    EXPECT_GE(p.y, 0.0);
    EXPECT_LE(p.y, 1.0);
  }
}

TEST(Cv, SeparableDataHighF1) {
  const auto m = planted(200, 0.1, 15);
  const auto cv = kfold_cv(m, ModelKind::kGbdt, small_params(), 5, 1);
  ASSERT_EQ(cv.folds.size(), 5u);
  EXPECT_GE(cv.mean.f1, 0.95);
  EXPECT_EQ(cv.out_of_fold.size(), m.rows());
  const auto again = kfold_cv(m, ModelKind::kGbdt, small_params(), 5, 1, 2);
  EXPECT_EQ(cv.out_of_fold, again.out_of_fold);
}

// Profile column keeps its signal in window 2; the post column loses it.
std::pair<FeatureMatrix, FeatureMatrix> drift_windows() {
  auto make = [](std::uint64_t seed, bool drift) {
    Rng rng(seed);
    FeatureMatrix m;
    m.names = {"account_age_days", "post_emb_0"};
    m.families = {Family::kProfile, Family::kPostEmbedding};
    for (int i = 0; i < 1200; ++i) {
      const int y = i % 2;
      const double a = y + 0.6 * rng.normal();
      const double p = (drift ? 0 : y) + 0.3 * rng.normal();
      m.add_row("u" + std::to_string(seed) + "_" + std::to_string(i), std::vector<double>{a, p});
      m.labels.push_back(y);
    }
    return m;
  };
  return {make(1, false), make(2, true)};
}

TEST(Protocol, StableSignalCarriesOverContentDriftDoesNot) {
  const auto [w1, w2] = drift_windows();
  ProtocolOptions o;
  o.params = small_params();
  o.seed = 3;
  const std::array<Family, 1> prof{Family::kProfile};
  const std::array<Family, 1> post{Family::kPostEmbedding};
  const auto p = second_window_protocol(w1.select_families(prof), w2.select_families(prof), o);
  const auto q = second_window_protocol(w1.select_families(post), w2.select_families(post), o);
  EXPECT_NEAR(p.second_test.f1, p.test.f1, 0.05);
  EXPECT_LT(q.second_test.roc_auc, q.test.roc_auc - 0.2);
  EXPECT_GT(p.second_test.f1, q.second_test.f1);
}

TEST(Protocol, DeterministicAndSecondTestUsesFullModel) {
  const auto m = planted(300, 0.8, 16);
  ProtocolOptions o;
  o.params = small_params();
  o.seed = 4;
  const auto a = second_window_protocol(m, m, o);
  const auto b = second_window_protocol(m, m, o);
  EXPECT_EQ(a.test.f1, b.test.f1);
  EXPECT_EQ(a.second_test.roc_auc, b.second_test.roc_auc);
  const auto direct = evaluate(a.full_model, m, SplitTag::kSecondTest);
  EXPECT_EQ(a.second_test.f1, direct.f1);
  EXPECT_EQ(a.second_test.roc_auc, direct.roc_auc);
  EXPECT_EQ(a.test.samples, 60u);
}

}  // namespace

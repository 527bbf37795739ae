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

#include <cmath>

#include "helpers.hpp"
#include "oracles.hpp"
#include "susp/random.hpp"
#include "susp/text_embedding.hpp"

namespace {

using namespace susp;
using namespace susp::embedding;

EmbeddingMatrix from_rows(const oracle::Matrix& rows) {
  EmbeddingMatrix m(rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) m.add_row("r" + std::to_string(i), rows[i]);
  return m;
}

oracle::Matrix random_rows(Rng& rng, std::size_t n, std::size_t d) {
  oracle::Matrix rows(n, std::vector<double>(d));
  // Anisotropic scales keep the spectrum well separated.
  for (auto& r : rows) {
    for (std::size_t j = 0; j < d; ++j) r[j] = rng.normal() * (1.0 + 0.7 * static_cast<double>(j));
  }
  return rows;
}

double sin_angle(std::span<const double> u, const std::vector<double>& v) {
  double dot = 0;
  for (std::size_t i = 0; i < v.size(); ++i) dot += u[i] * v[i];
  double res = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = u[i] - dot * v[i];
    res += r * r;
  }
  return std::sqrt(res);
}

TEST(Encoder, DeterministicUnitVectors) {
  const HashingEncoder enc(64);
  const auto a = enc.encode("Same text here");
  EXPECT_EQ(a, enc.encode("Same text here"));
  double n = 0;
  for (double v : enc.encode("abc")) n += v * v;
  EXPECT_NEAR(n, 1.0, 1e-12);
  double self = 0;
  for (double v : a) self += v * v;
  EXPECT_NEAR(self, 1.0, 1e-12);
  n = 0;
  for (double v : enc.encode("")) n += v * v;
  EXPECT_NEAR(n, 1.0, 1e-12);
  // Case and spacing do not matter; different text does.
  EXPECT_EQ(a, enc.encode("same   TEXT here"));
  EXPECT_NE(a, enc.encode("other words entirely"));
}

TEST(Encoder, NearDuplicatesAreClose) {
  const HashingEncoder enc(768);
  const auto a = enc.encode("Donate crypto now to help the cause, wallet below");
  const auto b = enc.encode("Donate crypto now to help the cause! wallet below");
  const auto c = enc.encode("Lovely weather for a walk in the park today");
  EXPECT_GT(oracle::cosine(a, b), 0.8);
  EXPECT_LT(oracle::cosine(a, c), 0.3);
}

TEST(Precomputed, MissingIdFails) {
  EmbeddingMatrix t(2);
  t.add_row("a", std::vector<double>{1, 0});
  const PrecomputedEmbeddings p(t);
  const std::vector<std::string> ids{"a", "b"}, texts{"", ""};
  try {
    p.embed(ids, texts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingEmbedding);
  }
}

TEST(EmbFile, RoundTrip) {
  testutil::TempDir dir;
  Rng rng(1);
  const auto m = from_rows(random_rows(rng, 5, 3));
  write_emb(dir / "x.emb", m);
  const auto back = read_emb(dir / "x.emb");
  EXPECT_EQ(back.ids(), m.ids());
  ASSERT_EQ(back.dim(), 3u);
  for (std::size_t i = 0; i < m.data().size(); ++i) {
    EXPECT_NEAR(back.data()[i], m.data()[i], 1e-6 * std::abs(m.data()[i]) + 1e-7);
  }
}

TEST(Pca, TwoByTwoExample) {
  const auto m = from_rows({{1, 1}, {-1, -1}, {2, 2}, {-2, -2}});
  const auto p = pca_fit(m, 1);
  EXPECT_NEAR(std::abs(p.component(0)[0]), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(std::abs(p.component(0)[1]), 1 / std::sqrt(2.0), 1e-12);
  const auto t = pca_transform(p, m);
  const double s = std::sqrt(2.0);
  const double expected[] = {s, -s, 2 * s, -2 * s};
  const double sign = t.row(0)[0] > 0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(t.row(i)[0], sign * expected[i], 1e-12);
}

TEST(Pca, MatchesJacobiOracle) {
  Rng rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rows = random_rows(rng, 50, 8);
    const auto p = pca_fit(from_rows(rows), 8);
    const auto ref = oracle::jacobi_eigen(oracle::covariance(rows));
    for (std::size_t i = 0; i < 8; ++i) {
      EXPECT_LE(sin_angle(p.component(i), ref.vectors[i]), 1e-6) << "trial " << trial << " pc " << i;
      EXPECT_NEAR(p.explained_variance[i], ref.values[i], 1e-8);
    }
  }
}

TEST(Pca, OrthonormalAndCentered) {
  Rng rng(8);
  const auto m = from_rows(random_rows(rng, 120, 10));
  const auto p = pca_fit(m, 6);
  for (std::size_t i = 0; i < p.k; ++i) {
    for (std::size_t j = 0; j < p.k; ++j) {
      double d = 0;
      for (std::size_t c = 0; c < p.input_dim; ++c) d += p.component(i)[c] * p.component(j)[c];
      if (i == j) EXPECT_NEAR(d, 1.0, 1e-8);
      else EXPECT_LT(std::abs(d), 1e-8);
    }
    if (i > 0) EXPECT_LE(p.explained_variance[i], p.explained_variance[i - 1]);
  }
  const auto t = pca_transform(p, m);
  for (std::size_t c = 0; c < p.k; ++c) {
    double mean = 0;
    for (std::size_t r = 0; r < t.rows(); ++r) mean += t.row(r)[c];
    EXPECT_NEAR(mean / static_cast<double>(t.rows()), 0.0, 1e-8);
  }
  const auto zero = pca_transform_row(p, p.mean);
  for (double v : zero) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Pca, FullRankReconstruction) {
  Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = from_rows(random_rows(rng, 50, 8));
    const auto p = pca_fit(m, 8);
    const auto back = pca_inverse_transform(p, pca_transform(p, m));
    for (std::size_t i = 0; i < m.data().size(); ++i) EXPECT_NEAR(back.data()[i], m.data()[i], 1e-6);
  }
  // Orthogonal data, k = dim.
  const auto o = from_rows({{3, 0, 0}, {0, 2, 0}, {0, 0, 1}, {0, 0, 0}});
  const auto po = pca_fit(o, 3);
  const auto bo = pca_inverse_transform(po, pca_transform(po, o));
  for (std::size_t i = 0; i < o.data().size(); ++i) EXPECT_NEAR(bo.data()[i], o.data()[i], 1e-8);
}

TEST(Pca, RandomizedPathAgreesWithExact) {
  Rng rng(31);
  const auto rows = random_rows(rng, 300, 40);
  const auto m = from_rows(rows);
  PcaOptions exact, approx;
  approx.exact_dim_limit = 8;
  approx.power_iterations = 12;
  const auto a = pca_fit(m, 5, exact), b = pca_fit(m, 5, approx);
  for (std::size_t i = 0; i < 5; ++i) {
    std::vector<double> v(b.component(i).begin(), b.component(i).end());
    EXPECT_LE(sin_angle(a.component(i), v), 1e-3);
    EXPECT_NEAR(a.explained_variance[i], b.explained_variance[i], 1e-3 * a.explained_variance[i]);
  }
}

TEST(Pca, ConstantRowsAndErrors) {
  const auto m = from_rows({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}});
  const auto p = pca_fit(m, 2);
  for (double v : p.explained_variance) EXPECT_NEAR(v, 0.0, 1e-15);
  const auto t = pca_transform(p, m);
  for (double v : t.data()) EXPECT_NEAR(v, 0.0, 1e-12);

  const auto wrong = from_rows({{1, 2}, {3, 4}});
  try {
    pca_transform(p, wrong);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
  EXPECT_THROW(pca_fit(m, 4), Error);
}

TEST(Pca, FileRoundTrip) {
  testutil::TempDir dir;
  Rng rng(3);
  const auto p = pca_fit(from_rows(random_rows(rng, 30, 5)), 3);
  write_pca(dir / "p.pca", p);
  const auto q = read_pca(dir / "p.pca");
  EXPECT_EQ(q.k, 3u);
  EXPECT_EQ(q.input_dim, 5u);
  for (std::size_t i = 0; i < p.components.size(); ++i) {
    EXPECT_NEAR(q.components[i], p.components[i], 1e-6);
  }
}

TEST(PostFeatures, MeanOfProjectionsAndKindFractions) {
  using corpus::TweetKind;
  const HashingEncoder enc(32);
  std::vector<std::string> ids, texts;
  Rng rng(6);
  for (int i = 0; i < 40; ++i) {
    ids.push_back("p" + std::to_string(i));
    texts.push_back("post number " + std::to_string(i * 37 % 11) + " words " + std::to_string(i));
  }
  const auto raw = enc.embed(ids, texts);
  const auto pca = pca_fit(raw, 4);
  const auto reduced = pca_transform(pca, raw);

  std::vector<corpus::Tweet> timeline;
  timeline.push_back(testutil::tweet("p3", "u", 1, TweetKind::kOriginal, texts[3]));
  auto one = user_post_features(timeline, enc, pca);
  ASSERT_EQ(one.size(), 7u);
  for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(one[c], reduced.row(3)[c], 1e-9);
  EXPECT_EQ(std::vector<double>(one.begin() + 4, one.end()), (std::vector<double>{1, 0, 0}));

  timeline.push_back(testutil::tweet("p8", "u", 2, TweetKind::kRetweet, texts[8]));
  const auto two = user_post_features(timeline, enc, pca);
  EXPECT_EQ(std::vector<double>(two.begin() + 4, two.end()), (std::vector<double>{0.5, 0.5, 0}));
  const auto agg = aggregate_post_embeddings(timeline, reduced);
  for (std::size_t c = 0; c < agg.size(); ++c) EXPECT_NEAR(two[c], agg[c], 1e-9);
  EXPECT_EQ(two, user_post_features(timeline, enc, pca));

  const auto empty = user_post_features({}, enc, pca);
  for (double v : empty) EXPECT_TRUE(is_missing(v));
  EXPECT_EQ(post_feature_names(4).size(), 7u);
}

}  // namespace

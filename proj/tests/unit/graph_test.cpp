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
#include "susp/common.hpp"
#include "susp/graph.hpp"
#include "susp/random.hpp"

namespace {

using namespace susp;
using namespace susp::graph;
using corpus::TweetKind;
using testutil::kT0;

const corpus::TimeWindow kWindow{kT0, kT0 + 7 * kSecondsPerDay};

corpus::Corpus small_corpus() {
  corpus::CorpusBuilder b;
  b.add_tweet(testutil::tweet("1", "A", kT0 + 10, TweetKind::kRetweet, "rt", 5, "B"));
  b.add_tweet(testutil::tweet("2", "A", kT0 + 20, TweetKind::kRetweet, "rt", 5, "B"));
  auto q = testutil::tweet("3", "C", kT0 + 30, TweetKind::kQuote, "q", 5, "A");
  q.mentions = {"B"};
  b.add_tweet(q);
  auto o = testutil::tweet("4", "B", kT0 + 40);
  o.mentions = {"C", "A"};
  b.add_tweet(o);
  b.add_tweet(testutil::tweet("5", "A", kT0 + 8 * kSecondsPerDay, TweetKind::kRetweet, "late", 5, "C"));
  return std::move(b).build();
}

std::uint32_t weight_of(const RelationGraph& g, std::string_view s, Relation r, std::string_view d) {
  const auto si = g.node(s);
  const auto di = g.node(d);
  if (!si || !di) return 0;
  for (const auto& e : g.edges()) {
    if (e.source == *si && e.relation == r && e.destination == *di) return e.weight;
  }
  return 0;
}

TEST(BuildGraph, CountsRepeatedInteractions) {
  const auto g = build_graph(small_corpus(), kWindow);
  EXPECT_EQ(weight_of(g, "A", Relation::kRetweet, "B"), 2u);
  EXPECT_EQ(weight_of(g, "C", Relation::kQuote, "A"), 1u);
  EXPECT_EQ(weight_of(g, "C", Relation::kMention, "B"), 1u);
  EXPECT_EQ(weight_of(g, "B", Relation::kMention, "C"), 1u);
  EXPECT_EQ(weight_of(g, "A", Relation::kRetweet, "C"), 0u);  // outside the window
  EXPECT_EQ(g.total_weight(), 6u);
}

TEST(BuildGraph, RelationFilter) {
  const std::array<Relation, 1> quote{Relation::kQuote};
  const auto g = build_graph(small_corpus(), kWindow, quote);
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(g.edge_count(Relation::kQuote), 1u);
  EXPECT_EQ(g.edge_count(Relation::kRetweet), 0u);
  const auto full = build_graph(small_corpus(), kWindow);
  EXPECT_EQ(full.filter(quote).edge_count(), 1u);
}

TEST(BuildGraph, EmptyWindow) {
  const auto g = build_graph(small_corpus(), {kT0 - 10 * kSecondsPerDay, kT0 - kSecondsPerDay});
  EXPECT_TRUE(g.empty());
}

TEST(RelationGraphTest, InvariantsAndMerge) {
  RelationGraph a;
  a.add_edge("x", Relation::kMention, "x");  // self-loop ignored
  a.add_edge("x", Relation::kMention, "y", 2);
  EXPECT_EQ(a.edge_count(), 1u);
  EXPECT_THROW(a.add_edge("x", Relation::kMention, "y", 0), Error);
  RelationGraph b;
  b.add_edge("y", Relation::kRetweet, "z");
  b.add_edge("x", Relation::kMention, "y");
  const auto m = merge(a, b);
  EXPECT_EQ(weight_of(m, "x", Relation::kMention, "y"), 3u);
  EXPECT_EQ(m.node_count(), 3u);
  for (const auto& e : m.edges()) {
    EXPECT_LT(e.source, m.node_count());
    EXPECT_LT(e.destination, m.node_count());
    EXPECT_GE(e.weight, 1u);
  }
}

TEST(RelationGraphTest, CsvRoundTrip) {
  testutil::TempDir dir;
  const auto g = build_graph(small_corpus(), kWindow);
  write_graph_csv(dir / "g.csv", g);
  const auto back = read_graph_csv(dir / "g.csv");
  EXPECT_EQ(back.total_weight(), g.total_weight());
  EXPECT_EQ(weight_of(back, "A", Relation::kRetweet, "B"), 2u);
}

TEST(SplitEdges, HoldsOutPerRelation) {
  RelationGraph g;
  for (int i = 0; i < 40; ++i) {
    g.add_edge("n" + std::to_string(i), Relation::kRetweet, "n" + std::to_string(i + 1));
    g.add_edge("n" + std::to_string(i), Relation::kQuote, "n" + std::to_string(i + 2));
  }
  const auto s = split_edges(g, 0.1, 3);
  EXPECT_EQ(s.held_out.size(), 8u);
  EXPECT_EQ(s.train.edge_count(), 72u);
  EXPECT_EQ(s.train.node_count(), g.node_count());
  for (const auto& h : s.held_out) {
    for (const auto& e : s.train.edges()) {
      EXPECT_FALSE(e.source == h.source && e.relation == h.relation && e.destination == h.destination);
    }
  }
}

TEST(Train, EmptyGraphAndBadDim) {
  EXPECT_THROW(train_embeddings(RelationGraph{}, {}), Error);
  RelationGraph g;
  g.add_edge("a", Relation::kRetweet, "b");
  TrainOptions o;
  o.dim = 0;
  EXPECT_THROW(train_embeddings(g, o), Error);
}

TEST(Train, TwoNodeLossDecreases) {
  RelationGraph g;
  g.add_edge("a", Relation::kRetweet, "b");
  TrainOptions o;
  o.dim = 8;
  o.epochs = 200;
  o.negatives = 4;
  o.seed = 1;
  const auto r = train_embeddings(g, o);
  ASSERT_EQ(r.epoch_loss.size(), 200u);
  EXPECT_LT(r.epoch_loss.back(), r.epoch_loss.front());
}

RelationGraph two_cliques(std::size_t n) {
  RelationGraph g;
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        g.add_edge("c" + std::to_string(c) + "_" + std::to_string(i), Relation::kMention,
                   "c" + std::to_string(c) + "_" + std::to_string(j));
      }
    }
  }
  return g;
}

TEST(Train, CliquesScoreAboveCrossPairs) {
  const auto g = two_cliques(10);
  TrainOptions o;
  o.dim = 16;
  o.epochs = 30;
  o.negatives = 10;
  o.batch_size = 64;
  o.seed = 9;
  const auto emb = train_embeddings(g, o).embeddings;
  double intra = 0, inter = 0;
  std::size_t ni = 0, nx = 0;
  for (std::size_t s = 0; s < emb.nodes.size(); ++s) {
    for (std::size_t d = 0; d < emb.nodes.size(); ++d) {
      if (s == d) continue;
      const bool same = emb.nodes[s].substr(0, 2) == emb.nodes[d].substr(0, 2);
      const double v = emb.score(s, Relation::kMention, d);
      (same ? intra : inter) += v;
      ++(same ? ni : nx);
    }
  }
  EXPECT_GT(intra / static_cast<double>(ni), inter / static_cast<double>(nx));
}

TEST(Train, DeterministicSingleThread) {
  const auto g = two_cliques(6);
  TrainOptions o;
  o.dim = 8;
  o.epochs = 5;
  o.negatives = 5;
  o.seed = 42;
  const auto a = train_embeddings(g, o);
  const auto b = train_embeddings(g, o);
  EXPECT_EQ(a.embeddings.vectors, b.embeddings.vectors);
  EXPECT_EQ(a.embeddings.relation_scale, b.embeddings.relation_scale);
  EXPECT_EQ(a.epoch_loss, b.epoch_loss);
  for (double v : a.embeddings.vectors) EXPECT_TRUE(std::isfinite(v));
}

TEST(Train, WarmStartKeepsSharedNodes) {
  const auto g = two_cliques(5);
  TrainOptions o;
  o.dim = 8;
  o.epochs = 3;
  o.seed = 1;
  const auto first = train_embeddings(g, o).embeddings;
  o.epochs = 0;
  o.warm_start = &first;
  const auto again = train_embeddings(g, o).embeddings;
  for (std::size_t i = 0; i < again.nodes.size(); ++i) {
    const auto j = first.find(again.nodes[i]);
    ASSERT_TRUE(j.has_value());
    const auto u = again.vector(i);
    const auto v = first.vector(*j);
    EXPECT_TRUE(std::equal(u.begin(), u.end(), v.begin()));
  }
}

TEST(Ranking, PerfectRanking) {
  const std::vector<double> pos{5, 6};
  const std::vector<std::vector<double>> neg{{1, 2}, {0, 3}};
  const auto r = ranking_metrics(pos, neg);
  EXPECT_DOUBLE_EQ(r.mrr, 1.0);
  EXPECT_DOUBLE_EQ(r.auc, 1.0);
}

TEST(Ranking, RanksOneTwoFour) {
  const std::vector<double> pos{10, 10, 10};
  const std::vector<std::vector<double>> neg{{1, 2, 3}, {11, 2, 3}, {11, 12, 13}};
  EXPECT_NEAR(ranking_metrics(pos, neg).mrr, (1 + 0.5 + 0.25) / 3, 1e-12);
}

TEST(Ranking, AllScoresIdentical) {
  const std::vector<double> pos{1, 1};
  const std::vector<std::vector<double>> neg{{1, 1, 1}, {1, 1, 1}};
  const auto r = ranking_metrics(pos, neg);
  EXPECT_DOUBLE_EQ(r.auc, 0.5);
  EXPECT_DOUBLE_EQ(r.mrr, 1.0 / 2.5);
}

TEST(Ranking, InvariantUnderIncreasingTransform) {
  Rng rng(4);
  std::vector<double> pos(50);
  std::vector<std::vector<double>> neg(50, std::vector<double>(20));
  for (std::size_t i = 0; i < pos.size(); ++i) {
    pos[i] = std::round(rng.normal() * 4) / 4;  // coarse grid forces ties
    for (auto& v : neg[i]) v = std::round(rng.normal() * 4) / 4;
  }
  auto f = [](double x) { return x * x * x + 1.0; };
  auto tp = pos;
  auto tn = neg;
  for (auto& v : tp) v = f(v);
  for (auto& l : tn) for (auto& v : l) v = f(v);
  const auto a = ranking_metrics(pos, neg);
  const auto b = ranking_metrics(tp, tn);
  EXPECT_DOUBLE_EQ(a.mrr, b.mrr);
  EXPECT_DOUBLE_EQ(a.auc, b.auc);
  EXPECT_GT(a.mrr, 0.0);
  EXPECT_LE(a.mrr, 1.0);
}

TEST(Evaluate, TrainedCliquesRankHeldOutEdges) {
  const auto g = two_cliques(12);
  const auto split = split_edges(g, 0.1, 5);
  TrainOptions o;
  o.dim = 16;
  o.epochs = 30;
  o.negatives = 10;
  o.batch_size = 64;
  o.seed = 2;
  const auto emb = train_embeddings(split.train, o).embeddings;
  EvalOptions e;
  e.negatives = 20;
  e.seed = 7;
  e.filter = &g;
  const auto r = evaluate(emb, split.held_out, e);
  EXPECT_EQ(r.positives, split.held_out.size());
  EXPECT_GT(r.auc, 0.9);
  EXPECT_EQ(r.negatives_per_positive, 20u);
  EXPECT_EQ(r.seed, 7u);
  const auto again = evaluate(emb, split.held_out, e);
  EXPECT_EQ(r.mrr, again.mrr);
}

NodeEmbeddings tiny_embeddings() {
  NodeEmbeddings emb;
  emb.dim = 2;
  emb.nodes = {"a", "b", "c"};
  emb.vectors = {1, 0, 0.5, 0.5, -1, 2};
  for (auto& s : emb.relation_scale) s = {1.0, 2.0};
  return emb;
}

TEST(Export, VectorsAndSentinels) {
  const auto emb = tiny_embeddings();
  const std::vector<std::string> users{"c", "ghost", "a"};
  const auto m = export_node_features(emb, users);
  ASSERT_EQ(m.rows(), 3u);
  ASSERT_EQ(m.cols(), 2u);
  EXPECT_EQ(m.at(0, 0), -1.0);
  EXPECT_EQ(m.at(0, 1), 2.0);
  EXPECT_TRUE(is_missing(m.at(1, 0)));
  EXPECT_TRUE(is_missing(m.at(1, 1)));
  EXPECT_EQ(m.at(2, 0), 1.0);
  EXPECT_EQ(m.names, graph_feature_names(2));
}

TEST(Export, EmbeddingFileRoundTrip) {
  testutil::TempDir dir;
  const auto emb = tiny_embeddings();
  write_node_embeddings(dir / "g.emb", emb);
  const auto back = read_node_embeddings(dir / "g.emb");
  EXPECT_EQ(back.nodes, emb.nodes);
  EXPECT_EQ(back.vectors, emb.vectors);  // values are exact in f32
  EXPECT_EQ(back.relation_scale, emb.relation_scale);
}

TEST(Scoring, InvariantUnderNodeRelabeling) {
  Rng rng(8);
  NodeEmbeddings emb;
  emb.dim = 4;
  for (int i = 0; i < 10; ++i) emb.nodes.push_back("n" + std::to_string(i));
  emb.vectors.resize(40);
  for (auto& v : emb.vectors) v = rng.normal();
  for (auto& s : emb.relation_scale) {
    s.resize(4);
    for (auto& v : s) v = rng.normal();
  }
  std::vector<std::size_t> perm(10);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  NodeEmbeddings p = emb;
  for (std::size_t i = 0; i < 10; ++i) {
    p.nodes[perm[i]] = emb.nodes[i];
    std::copy_n(emb.vectors.begin() + static_cast<std::ptrdiff_t>(i * 4), 4,
                p.vectors.begin() + static_cast<std::ptrdiff_t>(perm[i] * 4));
  }
  for (std::size_t s = 0; s < 10; ++s) {
    for (std::size_t d = 0; d < 10; ++d) {
      for (Relation r : kAllRelations) {
        EXPECT_EQ(emb.score(s, r, d), p.score(perm[s], r, perm[d]));
      }
    }
  }
  const auto a = export_node_features(emb, emb.nodes);
  const auto b = export_node_features(p, emb.nodes);
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(a.at(i, j), b.at(i, j));
  }
}

}  // namespace

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

#ifndef SUSP_GRAPH_HPP_
#define SUSP_GRAPH_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "susp/corpus.hpp"
#include "susp/feature_matrix.hpp"

namespace susp::graph {

enum class Relation : std::uint8_t { kRetweet = 0, kMention = 1, kQuote = 2 };

inline constexpr std::array<Relation, 3> kAllRelations = {
    Relation::kRetweet, Relation::kMention, Relation::kQuote};

std::string_view relation_label(Relation r);
Relation parse_relation(std::string_view s);

struct Edge {
  std::uint32_t source = 0;
  Relation relation = Relation::kRetweet;
  std::uint32_t destination = 0;
  std::uint32_t weight = 1;

  bool operator==(const Edge&) const = default;
};

// Typed user-to-user multigraph. Parallel interactions collapse into one
// edge whose weight counts them.
class RelationGraph {
 public:
  std::uint32_t add_node(std::string_view name);
  std::optional<std::uint32_t> node(std::string_view name) const;
  // Self-loops are ignored. weight must be >= 1.
  void add_edge(std::string_view source, Relation r, std::string_view destination,
                std::uint32_t weight = 1);

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::uint64_t total_weight() const;
  bool empty() const { return edges_.empty(); }
  std::size_t edge_count(Relation r) const;

  // Same node table, edges restricted to the given relations.
  RelationGraph filter(std::span<const Relation> relations) const;

 private:
  std::vector<std::string> nodes_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, std::size_t> edge_index_[3];
};

// Retweet and quote edges point at the referenced author; mention edges come
// from originals and quotes and point at each mentioned user id.
RelationGraph build_graph(const corpus::Corpus& corpus, corpus::TimeWindow window,
                          std::span<const Relation> relations = kAllRelations);

// Union of edge multisets; weights add.
RelationGraph merge(const RelationGraph& a, const RelationGraph& b);

// CSV source,relation,destination,weight
void write_graph_csv(const std::filesystem::path& path, const RelationGraph& g);
RelationGraph read_graph_csv(const std::filesystem::path& path);

struct EdgeSplit {
  RelationGraph train;        // full node table
  std::vector<Edge> held_out; // node ids refer to train's table
};

// Holds out round(fraction * edges) distinct edges per relation.
EdgeSplit split_edges(const RelationGraph& g, double fraction, std::uint64_t seed);

struct NodeEmbeddings {
  std::size_t dim = 0;
  std::vector<std::string> nodes;
  std::vector<double> vectors;  // nodes.size() x dim
  std::array<std::vector<double>, 3> relation_scale;  // each dim wide

  std::span<const double> vector(std::size_t node) const {
    return {vectors.data() + node * dim, dim};
  }
  // Linear scan; build a map for repeated lookups.
  std::optional<std::size_t> find(std::string_view name) const;
  // sum_i s_i * theta_r,i * d_i
  double score(std::size_t source, Relation r, std::size_t destination) const;
};

struct TrainOptions {
  std::size_t dim = 150;
  int epochs = 10;
  double learning_rate = 0.1;
  std::size_t negatives = 100;
  std::size_t batch_size = 1024;
  std::uint64_t seed = 0;
  // 1 = deterministic sequential updates; > 1 = lock-free parallel updates.
  int threads = 1;
  // Nodes found here start from their stored vectors; relation scales too.
  const NodeEmbeddings* warm_start = nullptr;
};

struct TrainResult {
  NodeEmbeddings embeddings;
  std::vector<double> epoch_loss;  // mean loss per positive
};

// Softmax cross-entropy of each positive against negatives drawn uniformly
// over destinations and shared across a batch; row-wise Adagrad updates.
// Throws kEmptyGraph (and kInvalidArgument for dim 0).
TrainResult train_embeddings(const RelationGraph& g, const TrainOptions& options);

// Mean loss over all edge occurrences with one fixed negative sample.
double training_loss(const NodeEmbeddings& emb, const RelationGraph& g,
                     std::size_t negatives, std::uint64_t seed);

struct RankingEval {
  double mrr = 0.0;
  double auc = 0.0;
  std::size_t positives = 0;
  std::size_t negatives_per_positive = 0;
  std::uint64_t seed = 0;
};

// Rank 1 is best; ties get the mean rank. AUC pairs each positive with its
// own negatives, ties counting one half.
RankingEval ranking_metrics(std::span<const double> positive_scores,
                            std::span<const std::vector<double>> negative_scores);

struct EvalOptions {
  std::size_t negatives = 100;
  std::uint64_t seed = 0;
  // Skip corrupted destinations d' for which (source, *, d') is a known edge.
  const RelationGraph* filter = nullptr;
  int threads = 1;
};

RankingEval evaluate(const NodeEmbeddings& emb, std::span<const Edge> held_out,
                     const EvalOptions& options);

std::vector<std::string> graph_feature_names(std::size_t dim);

// One row per requested user: its vector, or all-missing when absent.
model::FeatureMatrix export_node_features(const NodeEmbeddings& emb,
                                          std::span<const std::string> users);

// EMB1 node table plus "<path>.relations.json" for the relation scales.
void write_node_embeddings(const std::filesystem::path& path, const NodeEmbeddings& emb);
NodeEmbeddings read_node_embeddings(const std::filesystem::path& path);

}  // namespace susp::graph

#endif  // SUSP_GRAPH_HPP_

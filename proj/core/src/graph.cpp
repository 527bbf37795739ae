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

#include "susp/graph.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <nlohmann/json.hpp>
#include <unordered_set>

#include "susp/io.hpp"
#include "susp/parallel.hpp"
#include "susp/random.hpp"
#include "susp/text_embedding.hpp"

namespace susp::graph {

std::string_view relation_label(Relation r) {
  switch (r) {
    case Relation::kRetweet: return "retweet";
    case Relation::kMention: return "mention";
    case Relation::kQuote: return "quote";
  }
  return "retweet";
}

Relation parse_relation(std::string_view s) {
  for (auto r : kAllRelations) {
    if (relation_label(r) == s) return r;
  }
  fail(ErrorCode::kInvalidArgument, "unknown relation: " + std::string(s));
}

std::uint32_t RelationGraph::add_node(std::string_view name) {
  auto [it, inserted] =
      index_.emplace(std::string(name), static_cast<std::uint32_t>(nodes_.size()));
  if (inserted) nodes_.emplace_back(name);
  return it->second;
}

std::optional<std::uint32_t> RelationGraph::node(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void RelationGraph::add_edge(std::string_view source, Relation r,
                             std::string_view destination, std::uint32_t weight) {
  if (weight == 0) fail(ErrorCode::kInvalidArgument, "edge weight must be >= 1");
  if (source == destination) return;
  const std::uint32_t s = add_node(source);
  const std::uint32_t d = add_node(destination);
  const std::uint64_t key = (static_cast<std::uint64_t>(s) << 32) | d;
  auto& idx = edge_index_[static_cast<std::size_t>(r)];
  auto [it, inserted] = idx.emplace(key, edges_.size());
  if (inserted) {
    edges_.push_back({s, r, d, weight});
  } else {
    edges_[it->second].weight += weight;
  }
}

std::uint64_t RelationGraph::total_weight() const {
  std::uint64_t w = 0;
  for (const auto& e : edges_) w += e.weight;
  return w;
}

std::size_t RelationGraph::edge_count(Relation r) const {
  return edge_index_[static_cast<std::size_t>(r)].size();
}

RelationGraph RelationGraph::filter(std::span<const Relation> relations) const {
  RelationGraph out;
  for (const auto& n : nodes_) out.add_node(n);
  for (const auto& e : edges_) {
    if (std::find(relations.begin(), relations.end(), e.relation) == relations.end()) {
      continue;
    }
    out.add_edge(nodes_[e.source], e.relation, nodes_[e.destination], e.weight);
  }
  return out;
}

RelationGraph build_graph(const corpus::Corpus& corpus, corpus::TimeWindow window,
                          std::span<const Relation> relations) {
  auto wanted = [&](Relation r) {
    return std::find(relations.begin(), relations.end(), r) != relations.end();
  };
  RelationGraph g;
  for (const auto& uid : corpus.user_ids()) {
    for (const auto& t : corpus.user_timeline(uid, window)) {
      if (t.kind == corpus::TweetKind::kRetweet && wanted(Relation::kRetweet) &&
          t.referenced_user_id) {
        g.add_edge(uid, Relation::kRetweet, *t.referenced_user_id);
      }
      if (t.kind == corpus::TweetKind::kQuote && wanted(Relation::kQuote) &&
          t.referenced_user_id) {
        g.add_edge(uid, Relation::kQuote, *t.referenced_user_id);
      }
      if (t.kind != corpus::TweetKind::kRetweet && wanted(Relation::kMention)) {
        for (const auto& m : t.mentions) g.add_edge(uid, Relation::kMention, m);
      }
    }
  }
  return g;
}

RelationGraph merge(const RelationGraph& a, const RelationGraph& b) {
  RelationGraph out;
  for (const auto* g : {&a, &b}) {
    for (const auto& n : g->nodes()) out.add_node(n);
  }
  for (const auto* g : {&a, &b}) {
    for (const auto& e : g->edges()) {
      out.add_edge(g->nodes()[e.source], e.relation, g->nodes()[e.destination], e.weight);
    }
  }
  return out;
}

void write_graph_csv(const std::filesystem::path& path, const RelationGraph& g) {
  io::AtomicFile f(path);
  auto& out = f.stream();
  out << "source,relation,destination,weight\n";
  for (const auto& e : g.edges()) {
    out << io::csv_escape(g.nodes()[e.source]) << ',' << relation_label(e.relation) << ','
        << io::csv_escape(g.nodes()[e.destination]) << ',' << e.weight << '\n';
  }
  f.commit();
}

RelationGraph read_graph_csv(const std::filesystem::path& path) {
  RelationGraph g;
  bool header = true;
  io::for_each_line(path, [&](std::string_view line) {
    if (line.empty()) return;
    auto cells = io::split_csv_line(line);
    if (header) {
      header = false;
      if (!cells.empty() && cells[0] == "source") return;
    }
    if (cells.size() != 4) fail(ErrorCode::kMalformedRecord, "graph row needs 4 columns");
    std::uint32_t w = 0;
    try {
      const long long parsed = std::stoll(cells[3]);
      if (parsed < 1 || parsed > std::numeric_limits<std::uint32_t>::max()) throw 0;
      w = static_cast<std::uint32_t>(parsed);
    } catch (...) {
      fail(ErrorCode::kMalformedRecord, "bad edge weight: " + cells[3]);
    }
    g.add_edge(cells[0], parse_relation(cells[1]), cells[2], w);
  });
  return g;
}

EdgeSplit split_edges(const RelationGraph& g, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "held-out fraction must lie in [0, 1)");
  }
  std::vector<bool> hold(g.edge_count(), false);
  for (auto r : kAllRelations) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < g.edge_count(); ++i) {
      if (g.edges()[i].relation == r) idx.push_back(i);
    }
    Rng rng(derive_seed(seed, relation_label(r)));
    rng.shuffle(idx);
    const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size())));
    for (std::size_t i = 0; i < k; ++i) hold[idx[i]] = true;
  }
  EdgeSplit out;
  for (const auto& n : g.nodes()) out.train.add_node(n);
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const auto& e = g.edges()[i];
    if (hold[i]) {
      out.held_out.push_back(e);
    } else {
      out.train.add_edge(g.nodes()[e.source], e.relation, g.nodes()[e.destination], e.weight);
    }
  }
  return out;
}

std::optional<std::size_t> NodeEmbeddings::find(std::string_view name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] == name) return i;
  }
  return std::nullopt;
}

double NodeEmbeddings::score(std::size_t source, Relation r, std::size_t destination) const {
  const double* s = vectors.data() + source * dim;
  const double* d = vectors.data() + destination * dim;
  const double* th = relation_scale[static_cast<std::size_t>(r)].data();
  double acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) acc += s[i] * th[i] * d[i];
  return acc;
}

namespace {

template <bool kAtomic>
inline double load(double& x) {
  if constexpr (kAtomic) {
    return std::atomic_ref<double>(x).load(std::memory_order_relaxed);
  } else {
    return x;
  }
}

template <bool kAtomic>
inline void store(double& x, double v) {
  if constexpr (kAtomic) {
    std::atomic_ref<double>(x).store(v, std::memory_order_relaxed);
  } else {
    x = v;
  }
}

constexpr double kAdagradEps = 1e-10;

struct Trainer {
  NodeEmbeddings& emb;
  std::vector<double>& node_g2;
  std::array<double, 3>& rel_g2;
  double lr;

  // Buffers are per call so parallel workers never share them.
  template <bool kAtomic>
  double step(const Edge& e, std::span<const std::uint32_t> negatives) {
    const std::size_t dim = emb.dim;
    const std::size_t nn = negatives.size();
    std::vector<double> s(dim), d(dim), th(dim), u(dim), gu(dim, 0.0);
    std::vector<double> negv(nn * dim), scores(nn + 1), p(nn + 1);
    std::vector<bool> masked(nn);
    double* S = emb.vectors.data() + e.source * dim;
    double* D = emb.vectors.data() + e.destination * dim;
    double* TH = emb.relation_scale[static_cast<std::size_t>(e.relation)].data();
    for (std::size_t i = 0; i < dim; ++i) {
      s[i] = load<kAtomic>(S[i]);
      d[i] = load<kAtomic>(D[i]);
      th[i] = load<kAtomic>(TH[i]);
      u[i] = s[i] * th[i];
    }
    double pos = 0.0;
    for (std::size_t i = 0; i < dim; ++i) pos += u[i] * d[i];
    scores[0] = pos;
    double mx = pos;
    for (std::size_t j = 0; j < nn; ++j) {
      masked[j] = negatives[j] == e.destination;
      if (masked[j]) continue;
      double* N = emb.vectors.data() + static_cast<std::size_t>(negatives[j]) * dim;
      double acc = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        negv[j * dim + i] = load<kAtomic>(N[i]);
        acc += u[i] * negv[j * dim + i];
      }
      scores[j + 1] = acc;
      mx = std::max(mx, acc);
    }
    double z = std::exp(pos - mx);
    for (std::size_t j = 0; j < nn; ++j) {
      if (!masked[j]) z += std::exp(scores[j + 1] - mx);
    }
    const double loss = -(pos - mx - std::log(z));
    p[0] = std::exp(pos - mx) / z;

    auto update_row = [&](double* row, double& g2, std::span<const double> grad) {
      double sq = 0.0;
      for (double g : grad) sq += g * g;
      const double acc = load<kAtomic>(g2) + sq / static_cast<double>(grad.size());
      store<kAtomic>(g2, acc);
      const double step_size = lr / (std::sqrt(acc) + kAdagradEps);
      for (std::size_t i = 0; i < grad.size(); ++i) {
        store<kAtomic>(row[i], load<kAtomic>(row[i]) - step_size * grad[i]);
      }
    };

    std::vector<double> grad(dim);
    const double g0 = p[0] - 1.0;
    for (std::size_t i = 0; i < dim; ++i) gu[i] = g0 * d[i];
    for (std::size_t j = 0; j < nn; ++j) {
      if (masked[j]) continue;
      const double pj = std::exp(scores[j + 1] - mx) / z;
      for (std::size_t i = 0; i < dim; ++i) {
        gu[i] += pj * negv[j * dim + i];
        grad[i] = pj * u[i];
      }
      update_row(emb.vectors.data() + static_cast<std::size_t>(negatives[j]) * dim,
                 node_g2[negatives[j]], grad);
    }
    for (std::size_t i = 0; i < dim; ++i) grad[i] = g0 * u[i];
    update_row(D, node_g2[e.destination], grad);
    for (std::size_t i = 0; i < dim; ++i) grad[i] = gu[i] * th[i];
    update_row(S, node_g2[e.source], grad);
    for (std::size_t i = 0; i < dim; ++i) grad[i] = gu[i] * s[i];
    update_row(TH, rel_g2[static_cast<std::size_t>(e.relation)], grad);
    return loss;
  }
};

double softmax_loss(const NodeEmbeddings& emb, const Edge& e,
                    std::span<const std::uint32_t> negatives) {
  const double pos = emb.score(e.source, e.relation, e.destination);
  std::vector<double> scores{pos};
  for (auto n : negatives) {
    if (n != e.destination) scores.push_back(emb.score(e.source, e.relation, n));
  }
  const double mx = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (double s : scores) z += std::exp(s - mx);
  return -(pos - mx - std::log(z));
}

std::vector<std::uint32_t> draw_nodes(Rng& rng, std::size_t n, std::size_t count) {
  std::vector<std::uint32_t> out(count);
  for (auto& v : out) v = static_cast<std::uint32_t>(rng.uniform_index(n));
  return out;
}

}  // namespace

TrainResult train_embeddings(const RelationGraph& g, const TrainOptions& options) {
  if (g.empty()) fail(ErrorCode::kEmptyGraph, "cannot train on an empty graph");
  if (options.dim == 0) fail(ErrorCode::kInvalidArgument, "embedding dim must be >= 1");
  const std::size_t n = g.node_count();
  const std::size_t dim = options.dim;

  TrainResult result;
  NodeEmbeddings& emb = result.embeddings;
  emb.dim = dim;
  emb.nodes = g.nodes();
  emb.vectors.resize(n * dim);
  Rng init(derive_seed(options.seed, "graph.init"));
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (double& v : emb.vectors) v = init.normal() * scale;
  for (auto& th : emb.relation_scale) th.assign(dim, 1.0);

  if (const NodeEmbeddings* warm = options.warm_start) {
    if (warm->dim != dim) {
      fail(ErrorCode::kDimensionMismatch, "warm-start embeddings have a different dim");
    }
    std::unordered_map<std::string_view, std::size_t> warm_index;
    for (std::size_t i = 0; i < warm->nodes.size(); ++i) warm_index.emplace(warm->nodes[i], i);
    for (std::size_t i = 0; i < n; ++i) {
      auto it = warm_index.find(emb.nodes[i]);
      if (it == warm_index.end()) continue;
      auto src = warm->vector(it->second);
      std::copy(src.begin(), src.end(), emb.vectors.begin() + static_cast<std::ptrdiff_t>(i * dim));
    }
    emb.relation_scale = warm->relation_scale;
  }

  std::vector<Edge> occurrences;
  occurrences.reserve(g.total_weight());
  for (const auto& e : g.edges()) occurrences.insert(occurrences.end(), e.weight, e);

  std::vector<double> node_g2(n, 0.0);
  std::array<double, 3> rel_g2{0.0, 0.0, 0.0};
  Trainer trainer{emb, node_g2, rel_g2, options.learning_rate};
  const std::size_t batch = std::max<std::size_t>(1, options.batch_size);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    Rng rng(derive_seed(derive_seed(options.seed, "graph.epoch"),
                        static_cast<std::uint64_t>(epoch)));
    rng.shuffle(occurrences);
    const std::size_t batches = (occurrences.size() + batch - 1) / batch;
    std::vector<std::vector<std::uint32_t>> negatives(batches);
    for (auto& neg : negatives) neg = draw_nodes(rng, n, options.negatives);
    std::vector<double> batch_loss(batches, 0.0);
    auto run_batch = [&](std::size_t b) {
      const std::size_t end = std::min(occurrences.size(), (b + 1) * batch);
      double loss = 0.0;
      for (std::size_t i = b * batch; i < end; ++i) {
        loss += options.threads > 1 ? trainer.step<true>(occurrences[i], negatives[b])
                                    : trainer.step<false>(occurrences[i], negatives[b]);
      }
      batch_loss[b] = loss;
    };
    parallel_for(batches, options.threads, run_batch);
    double total = 0.0;
    for (double l : batch_loss) total += l;
    result.epoch_loss.push_back(total / static_cast<double>(occurrences.size()));
  }
  return result;
}

double training_loss(const NodeEmbeddings& emb, const RelationGraph& g,
                     std::size_t negatives, std::uint64_t seed) {
  if (g.empty()) fail(ErrorCode::kEmptyGraph, "cannot score an empty graph");
  Rng rng(seed);
  const auto neg = draw_nodes(rng, emb.nodes.size(), negatives);
  double total = 0.0;
  for (const auto& e : g.edges()) total += e.weight * softmax_loss(emb, e, neg);
  return total / static_cast<double>(g.total_weight());
}

RankingEval ranking_metrics(std::span<const double> positive_scores,
                            std::span<const std::vector<double>> negative_scores) {
  if (positive_scores.size() != negative_scores.size()) {
    fail(ErrorCode::kInvalidArgument, "one negative list per positive required");
  }
  RankingEval out;
  double rr = 0.0;
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < positive_scores.size(); ++i) {
    const double pos = positive_scores[i];
    std::size_t greater = 0;
    std::size_t ties = 0;
    for (double s : negative_scores[i]) {
      if (s > pos) {
        ++greater;
      } else if (s == pos) {
        ++ties;
      }
    }
    const double rank = 1.0 + static_cast<double>(greater) + 0.5 * static_cast<double>(ties);
    rr += 1.0 / rank;
    const std::size_t less = negative_scores[i].size() - greater - ties;
    wins += static_cast<double>(less) + 0.5 * static_cast<double>(ties);
    pairs += negative_scores[i].size();
    out.negatives_per_positive = std::max(out.negatives_per_positive, negative_scores[i].size());
  }
  out.positives = positive_scores.size();
  out.mrr = out.positives == 0 ? 0.0 : rr / static_cast<double>(out.positives);
  out.auc = pairs == 0 ? 0.5 : wins / static_cast<double>(pairs);
  return out;
}

RankingEval evaluate(const NodeEmbeddings& emb, std::span<const Edge> held_out,
                     const EvalOptions& options) {
  const std::size_t n = emb.nodes.size();
  std::unordered_set<std::uint64_t> known;
  if (options.filter != nullptr) {
    std::unordered_map<std::string_view, std::uint32_t> index;
    for (std::size_t i = 0; i < n; ++i) index.emplace(emb.nodes[i], static_cast<std::uint32_t>(i));
    const auto& fg = *options.filter;
    for (const auto& e : fg.edges()) {
      auto s = index.find(fg.nodes()[e.source]);
      auto d = index.find(fg.nodes()[e.destination]);
      if (s == index.end() || d == index.end()) continue;
      known.insert((static_cast<std::uint64_t>(s->second) << 32) | d->second);
    }
  }
  std::vector<double> pos(held_out.size());
  std::vector<std::vector<double>> neg(held_out.size());
  parallel_for(held_out.size(), options.threads, [&](std::size_t i) {
    const Edge& e = held_out[i];
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(i)));
    pos[i] = emb.score(e.source, e.relation, e.destination);
    const std::size_t max_attempts = 100 * std::max<std::size_t>(options.negatives, 1);
    for (std::size_t attempt = 0;
         attempt < max_attempts && neg[i].size() < options.negatives && n > 1; ++attempt) {
      const auto c = static_cast<std::uint32_t>(rng.uniform_index(n));
      if (c == e.destination) continue;
      if (!known.empty() && known.contains((static_cast<std::uint64_t>(e.source) << 32) | c)) {
        continue;
      }
      neg[i].push_back(emb.score(e.source, e.relation, c));
    }
  });
  RankingEval out = ranking_metrics(pos, neg);
  out.negatives_per_positive = options.negatives;
  out.seed = options.seed;
  return out;
}

std::vector<std::string> graph_feature_names(std::size_t dim) {
  std::vector<std::string> names;
  char buf[32];
  for (std::size_t i = 0; i < dim; ++i) {
    std::snprintf(buf, sizeof buf, "graph_emb_%03zu", i);
    names.emplace_back(buf);
  }
  return names;
}

model::FeatureMatrix export_node_features(const NodeEmbeddings& emb,
                                          std::span<const std::string> users) {
  auto m = model::make_block(model::Family::kGraphEmbedding, graph_feature_names(emb.dim));
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < emb.nodes.size(); ++i) index.emplace(emb.nodes[i], i);
  const std::vector<double> sentinel(emb.dim, kMissing);
  for (const auto& u : users) {
    auto it = index.find(u);
    m.add_row(u, it == index.end() ? std::span<const double>(sentinel) : emb.vector(it->second));
  }
  return m;
}

namespace {
std::filesystem::path sidecar(const std::filesystem::path& path) {
  auto p = path;
  p += ".relations.json";
  return p;
}
}  // namespace

void write_node_embeddings(const std::filesystem::path& path, const NodeEmbeddings& emb) {
  embedding::EmbeddingMatrix m(emb.dim);
  for (std::size_t i = 0; i < emb.nodes.size(); ++i) m.add_row(emb.nodes[i], emb.vector(i));
  embedding::write_emb(path, m);
  nlohmann::json j;
  j["dim"] = emb.dim;
  for (auto r : kAllRelations) {
    j["relation_scale"][std::string(relation_label(r))] =
        emb.relation_scale[static_cast<std::size_t>(r)];
  }
  io::write_file_atomic(sidecar(path), j.dump(1) + "\n");
}

NodeEmbeddings read_node_embeddings(const std::filesystem::path& path) {
  const auto m = embedding::read_emb(path);
  NodeEmbeddings emb;
  emb.dim = m.dim();
  emb.nodes = m.ids();
  emb.vectors = m.data();
  const auto j = nlohmann::json::parse(io::read_file(sidecar(path)));
  if (j.at("dim").get<std::size_t>() != emb.dim) {
    fail(ErrorCode::kDimensionMismatch, "relation sidecar dim differs from node table");
  }
  for (auto r : kAllRelations) {
    auto v = j.at("relation_scale").at(std::string(relation_label(r))).get<std::vector<double>>();
    if (v.size() != emb.dim) fail(ErrorCode::kDimensionMismatch, "relation scale width");
    emb.relation_scale[static_cast<std::size_t>(r)] = std::move(v);
  }
  return emb;
}

}  // namespace susp::graph

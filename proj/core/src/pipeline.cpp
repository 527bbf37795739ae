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

#include "susp/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <memory>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "susp/activity_features.hpp"
#include "susp/clustering.hpp"
#include "susp/corpus.hpp"
#include "susp/explain.hpp"
#include "susp/graph.hpp"
#include "susp/io.hpp"
#include "susp/parallel.hpp"
#include "susp/profile_features.hpp"
#include "susp/random.hpp"
#include "susp/text_embedding.hpp"
#include "susp/textual_features.hpp"
#include "susp/wallets.hpp"

namespace susp::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kManifestFormat = 1;

std::string artifact_name(const fs::path& p, const fs::path& root) {
  const fs::path rel = p.lexically_normal().lexically_relative(root.lexically_normal());
  if (rel.empty() || *rel.begin() == "..") return p.filename().string();
  return rel.generic_string();
}

void write_json(const fs::path& path, const json& j) {
  io::write_file_atomic(path, j.dump(2) + "\n");
}

json read_json(const fs::path& path) {
  try {
    return json::parse(io::read_file(path));
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformedRecord, path.string() + ": " + e.what());
  }
}

void require(const fs::path& p, std::string_view what) {
  if (p.empty() || !fs::exists(p)) {
    fail(ErrorCode::kMissingArtifact,
         std::string(what) + " not found: " + (p.empty() ? "(unset)" : p.string()));
  }
}

// Records inputs and outputs of one stage and writes its manifest.
class StageRun {
 public:
  StageRun(const PipelineConfig& c, std::string name,
           const std::function<void(std::string_view)>& log)
      : config_(c), name_(std::move(name)), log_(log),
        started_(std::chrono::steady_clock::now()) {
    fs::create_directories(c.paths.workdir / "manifests");
  }

  std::uint64_t seed(std::string_view purpose) const {
    return derive_seed(config_.seed, name_ + "." + std::string(purpose));
  }

  void input(const fs::path& p, std::string_view what) {
    require(p, what);
    inputs_.push_back(p);
  }
  void output(const fs::path& p) { outputs_.push_back(p); }

  void note(std::string_view msg) const {
    if (log_) log_(name_ + ": " + std::string(msg));
  }

  void finish() {
    const fs::path& root = config_.paths.workdir;
    auto list = [&](const std::vector<fs::path>& paths) {
      json a = json::array();
      for (const auto& p : paths) {
        a.push_back({{"name", artifact_name(p, root)}, {"sha256", io::sha256_file(p)}});
      }
      return a;
    };
    json m = {{"stage", name_},
              {"format_version", kManifestFormat},
              {"config_hash", config_.hash()},
              {"seed", config_.seed},
              {"inputs", list(inputs_)},
              {"outputs", list(outputs_)}};
    write_json(root / "manifests" / (name_ + ".json"), m);
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - started_).count();
    write_json(root / "manifests" / (name_ + ".timings.json"),
               {{"stage", name_}, {"seconds", secs}, {"threads", config_.threads}});
    note("done in " + io::format_double(secs) + " s");
  }

 private:
  const PipelineConfig& config_;
  std::string name_;
  const std::function<void(std::string_view)>& log_;
  std::chrono::steady_clock::time_point started_;
  std::vector<fs::path> inputs_;
  std::vector<fs::path> outputs_;
};

struct Layout {
  fs::path root;
  fs::path corpus() const { return root / "corpus.sqlite"; }
  fs::path ingest_stats() const { return root / "ingest.json"; }
  fs::path users(int w) const { return root / ("users_w" + std::to_string(w) + ".csv"); }
  fs::path graph_csv(int w) const {
    return root / "graph" / ("graph_w" + std::to_string(w) + ".csv");
  }
  fs::path graph_emb(int w) const {
    return root / "graph" / ("graph_w" + std::to_string(w) + ".emb");
  }
  fs::path graph_eval() const { return root / "graph" / "graph_eval.json"; }
  fs::path features(int w) const {
    return root / "features" / ("features_w" + std::to_string(w) + ".csv");
  }
  fs::path cluster_dir() const { return root / "cluster"; }
  fs::path model(const std::string& t, bool full) const {
    return root / "models" / (t + (full ? "_full.json" : ".json"));
  }
  fs::path selection() const { return root / "models" / "selection.json"; }
  fs::path eval_dir(model::SplitTag s) const {
    return root / "eval" / std::string(model::to_string(s));
  }
  fs::path eval_summary(model::SplitTag s) const {
    return root / "eval" / (std::string(model::to_string(s)) + ".json");
  }
  fs::path explain_dir() const { return root / "explain"; }
};

void write_users(const fs::path& path, const corpus::LabeledUsers& users) {
  io::AtomicFile f(path);
  f.stream() << "user_id,label\n";
  for (const auto& u : users) f.stream() << io::csv_escape(u.user_id) << ',' << u.label << '\n';
  f.commit();
}

corpus::LabeledUsers read_users(const fs::path& path) {
  corpus::LabeledUsers out;
  bool header = true;
  io::for_each_line(path, [&](std::string_view line) {
    if (header) {
      header = false;
      return;
    }
    if (line.empty()) return;
    const auto cells = io::split_csv_line(line);
    if (cells.size() != 2 || (cells[1] != "0" && cells[1] != "1")) {
      fail(ErrorCode::kMalformedRecord, "bad users row in " + path.string());
    }
    out.push_back({cells[0], cells[1] == "1" ? 1 : 0});
  });
  return out;
}

std::vector<std::string> ids_of(const corpus::LabeledUsers& users) {
  std::vector<std::string> ids;
  ids.reserve(users.size());
  for (const auto& u : users) ids.push_back(u.user_id);
  return ids;
}

corpus::TimeWindow window_of(const PipelineConfig& c, int w) {
  const auto [w1, w2] = corpus::split_windows(c.window_start, c.window_days);
  return w == 1 ? w1 : w2;
}

corpus::Corpus load_corpus(StageRun& run, const Layout& l) {
  run.input(l.corpus(), "corpus store (run ingest first)");
  return corpus::CorpusStore(l.corpus()).load();
}

json parse_stats_json(const corpus::ParseStats& s) {
  return {{"parsed", s.parsed},
          {"skipped", s.skipped},
          {"duplicates", s.duplicates},
          {"warnings", s.warnings}};
}

json ranking_json(const graph::RankingEval& e) {
  return {{"mrr", e.mrr},
          {"auc", e.auc},
          {"positives", e.positives},
          {"negatives_per_positive", e.negatives_per_positive}};
}

json report_json(const model::EvalReport& r) {
  return {{"split", model::to_string(r.split)},
          {"samples", r.samples},
          {"positives", r.positives},
          {"f1", r.f1},
          {"roc_auc", r.roc_auc},
          {"accuracy", r.accuracy},
          {"precision", r.precision},
          {"recall", r.recall}};
}

std::unique_ptr<embedding::EmbeddingProvider> make_provider(const PipelineConfig& c,
                                                            StageRun& run) {
  if (c.text.provider == "precomputed") {
    run.input(c.paths.embeddings, "precomputed embeddings");
    return std::make_unique<embedding::PrecomputedEmbeddings>(
        embedding::PrecomputedEmbeddings::from_file(c.paths.embeddings));
  }
  return std::make_unique<embedding::HashingEncoder>(c.text.encoder_dim);
}

// Fits PCA on at most max_rows posts drawn uniformly from (ids, texts).
embedding::PcaModel fit_post_pca(const embedding::EmbeddingProvider& provider,
                                 std::span<const std::string> ids,
                                 std::span<const std::string> texts, std::size_t k,
                                 std::size_t max_rows, std::uint64_t seed) {
  std::vector<std::size_t> idx(ids.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  if (idx.size() > max_rows) {
    Rng rng(seed);
    rng.shuffle(idx);
    idx.resize(max_rows);
    std::sort(idx.begin(), idx.end());
  }
  std::vector<std::string> sid, stext;
  for (auto i : idx) {
    sid.push_back(ids[i]);
    stext.push_back(texts[i]);
  }
  const auto raw = provider.embed(sid, stext);
  if (raw.rows() < 2) fail(ErrorCode::kTooFewSamples, "too few posts to fit PCA");
  k = std::min({k, raw.rows(), raw.dim()});
  embedding::PcaOptions opts;
  opts.max_rows = max_rows;
  opts.seed = seed;
  return embedding::pca_fit(raw, k, opts);
}

model::FeatureMatrix target_matrix(const model::FeatureMatrix& x, const std::string& target) {
  if (target == "combination") return x;
  const model::Family f = model::parse_family(target);
  const std::array<model::Family, 1> fam{f};
  return x.select_families(fam);
}

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

Split window1_split(const PipelineConfig& c, const model::FeatureMatrix& x) {
  auto [tr, te] = model::stratified_split(x.labels, c.model.test_fraction,
                                          derive_seed(c.seed, "train.split"));
  return {std::move(tr), std::move(te)};
}

void check_target(const PipelineConfig& c, const std::string& t) {
  const auto targets = model_targets(c);
  if (std::find(targets.begin(), targets.end(), t) == targets.end()) {
    fail(ErrorCode::kInvalidArgument, "target " + t + " is not an enabled family or combination");
  }
}

bool has_family(const PipelineConfig& c, model::Family f) {
  return std::find(c.families.begin(), c.families.end(), f) != c.families.end();
}

}  // namespace

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::kIngest: return "ingest";
    case Stage::kGraph: return "graph";
    case Stage::kFeatures: return "features";
    case Stage::kCluster: return "cluster";
    case Stage::kTrain: return "train";
    case Stage::kEvaluate: return "evaluate";
    case Stage::kExplain: return "explain";
    case Stage::kReport: return "report";
    case Stage::kSynth: return "synth";
  }
  return "unknown";
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {}

fs::path Pipeline::manifest_path(Stage s) const {
  return workdir() / "manifests" / (std::string(to_string(s)) + ".json");
}

void Pipeline::ingest() {
  StageRun run(config_, "ingest", log_);
  const auto& p = config_.paths;
  run.input(p.tweets, "tweets file");
  run.input(p.snapshots, "snapshots file");
  run.input(p.labels, "labels file");
  const Layout l{workdir()};
  fs::create_directories(l.root);

  const fs::path tmp = l.corpus().string() + ".tmp";
  fs::remove(tmp);
  json stats;
  {
    corpus::CorpusStore store(tmp);
    stats["tweets"] = parse_stats_json(store.ingest_tweets_file(p.tweets));
    stats["snapshots"] = parse_stats_json(store.ingest_snapshots_file(p.snapshots));
    stats["labels"] = parse_stats_json(store.ingest_labels_file(p.labels));
  }
  fs::rename(tmp, l.corpus());
  run.output(l.corpus());
  run.note("corpus stored");

  const corpus::Corpus c = corpus::CorpusStore(l.corpus()).load();
  for (int w = 1; w <= 2; ++w) {
    const auto window = window_of(config_, w);
    const auto all = corpus::select_window_users(c, window);
    corpus::LabeledUsers chosen = all;
    json wj = {{"start", corpus::format_iso8601(window.start)},
               {"end", corpus::format_iso8601(window.end)},
               {"candidates", all.size()}};
    std::size_t pos = 0;
    for (const auto& u : all) pos += static_cast<std::size_t>(u.label);
    wj["suspended"] = pos;
    wj["normal"] = all.size() - pos;
    if (config_.balance) {
      try {
        chosen = corpus::undersample_balance(all, run.seed("balance.w" + std::to_string(w)));
      } catch (const Error& e) {
        // Window 1 must be usable; a missing second window only disables
        // the second test.
        if (w == 1 || e.code() != ErrorCode::kEmptyClass) throw;
        chosen.clear();
      }
    } else if (w == 1 && (pos == 0 || pos == all.size())) {
      fail(ErrorCode::kEmptyClass, "window 1 lacks one of the two classes");
    }
    wj["selected"] = chosen.size();
    stats["window" + std::to_string(w)] = wj;
    write_users(l.users(w), chosen);
    run.output(l.users(w));
  }
  stats["tweet_count"] = c.tweet_count();
  stats["snapshot_count"] = c.snapshot_count();
  write_json(l.ingest_stats(), stats);
  run.output(l.ingest_stats());
  run.finish();
}

void Pipeline::graph() {
  StageRun run(config_, "graph", log_);
  const Layout l{workdir()};
  const corpus::Corpus c = load_corpus(run, l);
  fs::create_directories(l.root / "graph");
  const auto& gc = config_.graph;

  graph::RelationGraph g[2];
  for (int w = 1; w <= 2; ++w) {
    g[w - 1] = graph::build_graph(c, window_of(config_, w));
    graph::write_graph_csv(l.graph_csv(w), g[w - 1]);
    run.output(l.graph_csv(w));
  }
  if (g[0].empty()) fail(ErrorCode::kEmptyGraph, "window 1 has no interaction edges");

  auto options = [&](std::size_t dim, std::string_view purpose) {
    graph::TrainOptions o;
    o.dim = dim;
    o.epochs = gc.epochs;
    o.learning_rate = gc.learning_rate;
    o.negatives = gc.negatives;
    o.batch_size = gc.batch_size;
    o.seed = run.seed(purpose);
    o.threads = gc.hogwild ? config_.threads : 1;
    return o;
  };

  std::vector<std::size_t> dims{gc.dim};
  for (auto d : gc.dims_sweep) {
    if (d > 0 && std::find(dims.begin(), dims.end(), d) == dims.end()) dims.push_back(d);
  }
  struct Setting {
    std::string name;
    std::vector<graph::Relation> relations;
  };
  std::vector<Setting> settings;
  for (auto r : graph::kAllRelations) settings.push_back({std::string(graph::relation_label(r)), {r}});
  settings.push_back({"multi_layer", {graph::kAllRelations.begin(), graph::kAllRelations.end()}});

  json eval = json::array();
  for (const auto& s : settings) {
    const graph::RelationGraph sub = g[0].filter(s.relations);
    for (auto dim : dims) {
      json row = {{"relations", s.name}, {"dim", dim}, {"edges", sub.edge_count()}};
      const auto split = graph::split_edges(sub, gc.holdout, run.seed("split." + s.name));
      if (split.held_out.empty() || split.train.empty()) {
        row["mrr"] = nullptr;
        row["auc"] = nullptr;
        eval.push_back(row);
        continue;
      }
      const auto trained =
          graph::train_embeddings(split.train, options(dim, "eval." + s.name));
      graph::EvalOptions eo;
      eo.negatives = gc.eval_negatives;
      eo.seed = run.seed("rank." + s.name);
      eo.filter = gc.filtered ? &sub : nullptr;
      eo.threads = config_.threads;
      const auto r = graph::evaluate(trained.embeddings, split.held_out, eo);
      row.update(ranking_json(r));
      row["held_out"] = split.held_out.size();
      row["final_loss"] = trained.epoch_loss.empty() ? 0.0 : trained.epoch_loss.back();
      eval.push_back(row);
      run.note(s.name + " dim " + std::to_string(dim) + " auc " + io::format_double(r.auc));
    }
  }
  write_json(l.graph_eval(), {{"filtered", gc.filtered}, {"results", eval}});
  run.output(l.graph_eval());

  const auto first = graph::train_embeddings(g[0], options(gc.dim, "window1"));
  graph::write_node_embeddings(l.graph_emb(1), first.embeddings);
  run.output(l.graph_emb(1));
  run.output(l.graph_emb(1).string() + ".relations.json");
  // Window-2 vectors continue from window 1 on the union graph so both
  // windows share one coordinate system.
  auto second_opts = options(gc.dim, "window2");
  second_opts.warm_start = &first.embeddings;
  const auto second = graph::train_embeddings(graph::merge(g[0], g[1]), second_opts);
  graph::write_node_embeddings(l.graph_emb(2), second.embeddings);
  run.output(l.graph_emb(2));
  run.output(l.graph_emb(2).string() + ".relations.json");
  run.finish();
}

void Pipeline::features() {
  StageRun run(config_, "features", log_);
  const Layout l{workdir()};
  const corpus::Corpus c = load_corpus(run, l);
  run.input(l.users(1), "window-1 users");
  run.input(l.users(2), "window-2 users");
  const corpus::LabeledUsers users[2] = {read_users(l.users(1)), read_users(l.users(2))};
  const auto ids1 = ids_of(users[0]);
  const fs::path dir = l.root / "features";
  fs::create_directories(dir);
  const int threads = config_.threads;

  textual::IdfTables idf;
  if (has_family(config_, model::Family::kTextual)) {
    idf = textual::build_idf_tables(c, ids1, window_of(config_, 1));
    idf.hashtags.write_csv(dir / "hashtag_idf.csv");
    idf.mentions.write_csv(dir / "mention_idf.csv");
    run.output(dir / "hashtag_idf.csv");
    run.output(dir / "mention_idf.csv");
  }

  std::unique_ptr<embedding::EmbeddingProvider> provider;
  embedding::PcaModel pca;
  if (has_family(config_, model::Family::kPostEmbedding)) {
    provider = make_provider(config_, run);
    std::vector<std::string> pids, ptexts;
    const auto w1 = window_of(config_, 1);
    for (const auto& u : ids1) {
      for (const auto& t : c.user_timeline(u, w1)) {
        pids.push_back(t.tweet_id);
        ptexts.push_back(t.text);
      }
    }
    pca = fit_post_pca(*provider, pids, ptexts, config_.text.feature_dim,
                       config_.text.pca_max_rows, run.seed("pca"));
    embedding::write_pca(dir / "post_pca.pca", pca);
    run.output(dir / "post_pca.pca");
    run.note("post PCA k=" + std::to_string(pca.k) + " from " + std::to_string(pids.size()) +
             " posts");
  }

  for (int w = 1; w <= 2; ++w) {
    const auto& u = users[w - 1];
    if (u.empty()) continue;
    const auto ids = ids_of(u);
    const auto window = window_of(config_, w);
    std::vector<model::FeatureMatrix> blocks;
    for (auto f : config_.families) {
      switch (f) {
        case model::Family::kProfile:
          blocks.push_back(profile::extract_family(c, ids, window, threads));
          break;
        case model::Family::kActivity:
          blocks.push_back(activity::extract_family(c, ids, window, threads));
          break;
        case model::Family::kTextual:
          blocks.push_back(textual::extract_family(c, ids, window, idf, threads));
          break;
        case model::Family::kPostEmbedding: {
          std::vector<std::vector<double>> rows(ids.size());
          parallel_for(ids.size(), threads, [&](std::size_t i) {
            rows[i] = embedding::user_post_features(c.user_timeline(ids[i], window),
                                                    *provider, pca);
          });
          auto b = model::make_block(model::Family::kPostEmbedding,
                                     embedding::post_feature_names(pca.k));
          for (std::size_t i = 0; i < ids.size(); ++i) b.add_row(ids[i], rows[i]);
          blocks.push_back(std::move(b));
          break;
        }
        case model::Family::kGraphEmbedding: {
          run.input(l.graph_emb(w), "graph embeddings (run graph first)");
          run.input(l.graph_emb(w).string() + ".relations.json", "graph relation scales");
          const auto emb = graph::read_node_embeddings(l.graph_emb(w));
          blocks.push_back(graph::export_node_features(emb, ids));
          break;
        }
      }
    }
    auto m = model::assemble(std::move(blocks));
    model::attach_labels(m, u);
    model::write_feature_csv(l.features(w), m);
    run.output(l.features(w));
    run.note("window " + std::to_string(w) + ": " + std::to_string(m.rows()) + " x " +
             std::to_string(m.cols()));
  }
  run.finish();
}

void Pipeline::cluster() {
  StageRun run(config_, "cluster", log_);
  const Layout l{workdir()};
  const corpus::Corpus c = load_corpus(run, l);
  run.input(l.users(1), "window-1 users");
  const auto users = read_users(l.users(1));
  const auto w1 = window_of(config_, 1);
  const fs::path dir = l.cluster_dir();
  fs::create_directories(dir);

  std::vector<std::string> ids, texts;
  std::vector<clustering::WalletDocument> docs;
  for (const auto& u : users) {
    if (u.label != 1) continue;
    for (const auto& t : c.user_timeline(u.user_id, w1)) {
      ids.push_back(t.tweet_id);
      texts.push_back(t.text);
      docs.push_back({t.tweet_id, t.user_id, t.text});
    }
  }
  if (ids.size() < 2) fail(ErrorCode::kEmptyClass, "too few suspended-user posts to cluster");

  const auto provider = make_provider(config_, run);
  const auto pca = fit_post_pca(*provider, ids, texts, config_.text.clustering_dim,
                                config_.text.pca_max_rows, run.seed("pca"));
  embedding::write_pca(dir / "cluster_pca.pca", pca);
  run.output(dir / "cluster_pca.pca");

  // Embed and reduce in chunks so the full-width vectors never coexist.
  embedding::EmbeddingMatrix reduced(pca.k);
  constexpr std::size_t kChunk = 4096;
  for (std::size_t lo = 0; lo < ids.size(); lo += kChunk) {
    const std::size_t n = std::min(kChunk, ids.size() - lo);
    const std::span<const std::string> cid(ids.data() + lo, n), ctext(texts.data() + lo, n);
    const auto part = embedding::pca_transform(pca, provider->embed(cid, ctext));
    for (std::size_t r = 0; r < part.rows(); ++r) reduced.add_row(part.ids()[r], part.row(r));
  }
  const auto a = clustering::cluster_cosine(reduced, config_.cluster.tau);
  run.note(std::to_string(a.clusters.size()) + " clusters from " + std::to_string(ids.size()) +
           " posts");

  const auto report = clustering::cluster_report(a, texts, config_.cluster.sample_n);
  clustering::write_report_jsonl(dir / "clusters.jsonl", report);
  clustering::write_report_digest(dir / "clusters.txt", report, config_.cluster.digest_top);
  {
    io::AtomicFile f(dir / "assignments.csv");
    f.stream() << "tweet_id,cluster_id\n";
    for (std::size_t i = 0; i < a.item_count(); ++i) {
      f.stream() << io::csv_escape(a.item_ids[i]) << ',' << a.cluster_of[i] << '\n';
    }
    f.commit();
  }
  run.output(dir / "clusters.jsonl");
  run.output(dir / "clusters.txt");
  run.output(dir / "assignments.csv");

  const auto hits = clustering::keyword_search(a, texts, config_.cluster.keywords, config_.threads);
  json hj = json::array();
  std::map<std::string, std::size_t> clusters_per_keyword;
  for (const auto& h : hits) {
    hj.push_back({{"cluster_id", h.cluster_id}, {"size", h.size}, {"counts", h.counts},
                  {"total", h.total}});
    for (const auto& [k, n] : h.counts) {
      if (n > 0) ++clusters_per_keyword[k];
    }
  }
  write_json(dir / "keyword_hits.json", hj);
  run.output(dir / "keyword_hits.json");

  const auto wallets = clustering::extract_wallets(docs, config_.threads);
  clustering::write_wallet_csv(dir / "wallets.csv", wallets);
  run.output(dir / "wallets.csv");
  std::map<std::string, std::set<std::string>> unique_wallets;
  for (const auto& w : wallets) {
    unique_wallets[std::string(clustering::chain_label(w.chain))].insert(w.address);
  }

  std::vector<std::size_t> sizes;
  std::size_t singletons = 0;
  for (const auto& cl : a.clusters) {
    sizes.push_back(cl.size);
    singletons += cl.size == 1 ? 1 : 0;
  }
  std::sort(sizes.rbegin(), sizes.rend());
  sizes.resize(std::min<std::size_t>(sizes.size(), 10));
  json summary = {{"items", a.item_count()},
                  {"clusters", a.clusters.size()},
                  {"singletons", singletons},
                  {"largest", sizes},
                  {"tau", config_.cluster.tau},
                  {"dim", pca.k},
                  {"keyword_clusters", clusters_per_keyword},
                  {"wallet_hits", wallets.size()},
                  {"unique_wallets",
                   {{"bitcoin", unique_wallets["bitcoin"].size()},
                    {"ethereum", unique_wallets["ethereum"].size()}}}};

  if (!config_.paths.toxicity_scores.empty()) {
    run.input(config_.paths.toxicity_scores, "toxicity scores");
    const std::unordered_set<std::string> known(ids.begin(), ids.end());
    const auto t = clustering::toxicity_summary(config_.paths.toxicity_scores, known,
                                                config_.cluster.toxicity_threshold);
    summary["toxicity"] = {{"scored", t.scored}, {"toxic", t.toxic},
                           {"unknown_ids", t.unknown_ids}, {"fraction", t.fraction},
                           {"zero_count", t.zero_count},
                           {"threshold", config_.cluster.toxicity_threshold}};
  } else {
    summary["toxicity"] = nullptr;
  }
  write_json(dir / "summary.json", summary);
  run.output(dir / "summary.json");
  run.finish();
}

void Pipeline::train() {
  StageRun run(config_, "train", log_);
  const Layout l{workdir()};
  run.input(l.features(1), "window-1 features (run features first)");
  const auto x = model::read_feature_csv(l.features(1));
  const Split split = window1_split(config_, x);
  fs::create_directories(l.root / "models");

  json selection = json::object();
  for (const auto& t : model_targets(config_)) {
    const auto xt = target_matrix(x, t);
    const auto seed = run.seed("fit." + t);
    const auto split_model =
        model::fit_with_selection(xt.select_rows(split.train), config_.model.kind,
                                  config_.model.params, config_.model.selection_threshold, seed);
    const auto full_model = model::fit_with_selection(
        xt, config_.model.kind, config_.model.params, config_.model.selection_threshold, seed);
    model::write_model(l.model(t, false), split_model);
    model::write_model(l.model(t, true), full_model);
    run.output(l.model(t, false));
    run.output(l.model(t, true));

    json per_family = json::object();
    for (auto f : config_.families) {
      std::size_t extracted = 0, selected = 0;
      for (auto ff : xt.families) extracted += ff == f ? 1 : 0;
      for (auto ff : split_model.families) selected += ff == f ? 1 : 0;
      if (extracted > 0) {
        per_family[std::string(model::to_string(f))] = {{"extracted", extracted},
                                                        {"selected", selected}};
      }
    }
    selection[t] = {{"extracted", xt.cols()},
                    {"selected", split_model.schema.size()},
                    {"families", per_family}};
    run.note(t + ": " + std::to_string(split_model.schema.size()) + " of " +
             std::to_string(xt.cols()) + " features kept");
  }
  write_json(l.selection(), {{"train_rows", split.train.size()},
                             {"test_rows", split.test.size()},
                             {"targets", selection}});
  run.output(l.selection());
  run.finish();
}

void Pipeline::evaluate(model::SplitTag tag) {
  StageRun run(config_, "evaluate_" + std::string(model::to_string(tag)), log_);
  const Layout l{workdir()};
  const bool second = tag == model::SplitTag::kSecondTest;
  const auto targets = model_targets(config_);
  // Models first: a missing model is the dependency error users hit most.
  std::map<std::string, model::TrainedModel> models;
  for (const auto& t : targets) {
    run.input(l.model(t, second), "trained model for " + t + " (run train first)");
    models[t] = model::read_model(l.model(t, second));
  }
  model::FeatureMatrix x;
  Split split;
  if (second) {
    run.input(l.features(2), "window-2 features");
    x = model::read_feature_csv(l.features(2));
  } else {
    run.input(l.features(1), "window-1 features");
    x = model::read_feature_csv(l.features(1));
    split = window1_split(config_, x);
  }
  const fs::path dir = l.eval_dir(tag);
  fs::create_directories(dir);

  json summary = json::object();
  for (const auto& t : targets) {
    const auto& m = models[t];
    const auto xt = target_matrix(x, t);
    model::EvalReport rep;
    json extra = json::object();
    if (tag == model::SplitTag::kValidation) {
      const auto xs = model::project(m, xt.select_rows(split.train));
      const auto cv = model::kfold_cv(xs, m.kind, config_.model.params, config_.model.k_folds,
                                      run.seed("cv." + t), config_.threads);
      rep = cv.mean;
      json folds = json::array();
      for (const auto& f : cv.folds) folds.push_back(report_json(f));
      extra["folds"] = folds;
    } else if (tag == model::SplitTag::kTest) {
      rep = model::evaluate(m, xt.select_rows(split.test), tag);
    } else {
      rep = model::evaluate(m, xt, tag);
    }
    json j = report_json(rep);
    j.update(extra);
    write_json(dir / (t + ".json"), j);
    model::write_curve_csv(dir / (t + "_roc.csv"), rep.roc);
    model::write_curve_csv(dir / (t + "_pr.csv"), rep.pr);
    run.output(dir / (t + ".json"));
    run.output(dir / (t + "_roc.csv"));
    run.output(dir / (t + "_pr.csv"));
    summary[t] = report_json(rep);
    run.note(t + " f1 " + io::format_double(rep.f1) + " auc " + io::format_double(rep.roc_auc));
  }
  write_json(l.eval_summary(tag), summary);
  run.output(l.eval_summary(tag));
  run.finish();
}

void Pipeline::explain() {
  StageRun run(config_, "explain", log_);
  const Layout l{workdir()};
  run.input(l.features(1), "window-1 features");
  const auto x = model::read_feature_csv(l.features(1));
  const Split split = window1_split(config_, x);
  const fs::path dir = l.explain_dir();
  fs::create_directories(dir);

  for (const auto& t : config_.explain.targets) {
    check_target(config_, t);
    run.input(l.model(t, false), "trained model for " + t);
    const auto m = model::read_model(l.model(t, false));
    const auto xt = target_matrix(x, t);
    std::vector<std::size_t> inst = split.test;
    if (inst.size() > config_.explain.instances) inst.resize(config_.explain.instances);
    explain::ExplainOptions opts;
    opts.background_rows = config_.explain.background_rows;
    opts.samples = config_.explain.samples;
    opts.seed = run.seed(t);
    opts.threads = config_.threads;
    const auto ex = explain::explain_matrix(m, xt.select_rows(inst), xt.select_rows(split.train),
                                            opts);
    const auto summary = explain::impact_summary(ex);
    explain::write_explanations_csv(dir / (t + "_explanations.csv"), ex);
    explain::write_summary_csv(dir / (t + "_summary.csv"), summary);
    json top = json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(summary.ranking.size(), 20); ++i) {
      const auto& r = summary.ranking[i];
      top.push_back({{"feature", r.feature}, {"mean_abs_phi", r.mean_abs_phi}, {"rank", r.rank}});
    }
    write_json(dir / (t + "_top.json"),
               {{"target", t},
                {"instances", ex.size()},
                {"mode", m.schema.size() <= explain::kMaxExactFeatures ? "exact" : "sampled"},
                {"top", top}});
    run.output(dir / (t + "_explanations.csv"));
    run.output(dir / (t + "_summary.csv"));
    run.output(dir / (t + "_top.json"));
    if (!summary.ranking.empty()) run.note(t + " top feature " + summary.ranking.front().feature);
  }
  run.finish();
}

void Pipeline::report() {
  StageRun run(config_, "report", log_);
  const Layout l{workdir()};
  auto optional_json = [&](const fs::path& p) -> json {
    if (!fs::exists(p)) return nullptr;
    run.input(p, "artifact");
    return read_json(p);
  };
  json r;
  r["config_hash"] = config_.hash();
  r["seed"] = config_.seed;
  r["ingest"] = optional_json(l.ingest_stats());
  r["feature_selection"] = optional_json(l.selection());
  r["graph_embedding"] = optional_json(l.graph_eval());

  json perf = json::object();
  for (auto tag : {model::SplitTag::kValidation, model::SplitTag::kTest,
                   model::SplitTag::kSecondTest}) {
    const json s = optional_json(l.eval_summary(tag));
    if (s.is_null()) continue;
    for (auto it = s.begin(); it != s.end(); ++it) {
      perf[it.key()][std::string(model::to_string(tag))] = {
          {"f1", it->at("f1")}, {"roc_auc", it->at("roc_auc")}, {"samples", it->at("samples")}};
    }
  }
  r["performance"] = perf;
  r["clusters"] = optional_json(l.cluster_dir() / "summary.json");

  json ex = json::object();
  for (const auto& t : config_.explain.targets) {
    const json j = optional_json(l.explain_dir() / (t + "_top.json"));
    if (!j.is_null()) ex[t] = j;
  }
  r["explanations"] = ex;
  write_json(l.root / "report.json", r);
  run.output(l.root / "report.json");
  run.finish();
}

void Pipeline::synth() {
  StageRun run(config_, "synth", log_);
  if (config_.paths.synth_out.empty()) {
    fail(ErrorCode::kInvalidArgument, "paths.synth_out must be set for synth");
  }
  const auto generated = synth::generate(config_.synth, run.seed("corpus"));
  const auto paths = synth::default_paths(config_.paths.synth_out);
  synth::write_corpus(generated, paths);
  run.output(paths.tweets);
  run.output(paths.snapshots);
  run.output(paths.labels);
  run.note(std::to_string(generated.tweets.size()) + " tweets, " +
           std::to_string(generated.labels.size()) + " labels");
  run.finish();
}

void Pipeline::run_all() {
  ingest();
  if (has_family(config_, model::Family::kGraphEmbedding)) graph();
  features();
  cluster();
  train();
  evaluate(model::SplitTag::kValidation);
  evaluate(model::SplitTag::kTest);
  if (fs::exists(Layout{workdir()}.features(2))) evaluate(model::SplitTag::kSecondTest);
  explain();
  report();
}

int exit_code(ErrorCode code) {
  return code == ErrorCode::kInvalidArgument ? 2 : 3;
}

std::string error_line(std::string_view code, std::string_view stage, std::string_view message) {
  return json{{"error", code}, {"stage", stage}, {"message", message}}.dump();
}

}  // namespace susp::pipeline

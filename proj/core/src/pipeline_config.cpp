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

#include <algorithm>

#include <nlohmann/json.hpp>

#include "susp/corpus.hpp"
#include "susp/io.hpp"
#include "susp/pipeline.hpp"

namespace susp::pipeline {

using nlohmann::json;

namespace {

json behavior_json(const synth::ClassBehavior& b) {
  return {{"account_age_mean_days", b.account_age_mean_days},
          {"account_age_min_days", b.account_age_min_days},
          {"statuses_per_day", b.statuses_per_day},
          {"followers_per_day", b.followers_per_day},
          {"friends_per_day", b.friends_per_day},
          {"favourites_per_day", b.favourites_per_day},
          {"listed_per_day", b.listed_per_day},
          {"rate_sigma", b.rate_sigma},
          {"observed_posts_per_day", b.observed_posts_per_day},
          {"retweet_prob", b.retweet_prob},
          {"quote_prob", b.quote_prob},
          {"reaction_log_mean", b.reaction_log_mean},
          {"reaction_log_sigma", b.reaction_log_sigma},
          {"duplicate_prob", b.duplicate_prob},
          {"diurnal", b.diurnal},
          {"default_image_prob", b.default_image_prob},
          {"digit_name_prob", b.digit_name_prob},
          {"verified_prob", b.verified_prob},
          {"hashtag_rate", b.hashtag_rate},
          {"url_prob", b.url_prob},
          {"mention_rate", b.mention_rate},
          {"mimic_prob", b.mimic_prob}};
}

synth::ClassBehavior behavior_from(const json& j) {
  synth::ClassBehavior b;
  b.account_age_mean_days = j.at("account_age_mean_days");
  b.account_age_min_days = j.at("account_age_min_days");
  b.statuses_per_day = j.at("statuses_per_day");
  b.followers_per_day = j.at("followers_per_day");
  b.friends_per_day = j.at("friends_per_day");
  b.favourites_per_day = j.at("favourites_per_day");
  b.listed_per_day = j.at("listed_per_day");
  b.rate_sigma = j.at("rate_sigma");
  b.observed_posts_per_day = j.at("observed_posts_per_day");
  b.retweet_prob = j.at("retweet_prob");
  b.quote_prob = j.at("quote_prob");
  b.reaction_log_mean = j.at("reaction_log_mean");
  b.reaction_log_sigma = j.at("reaction_log_sigma");
  b.duplicate_prob = j.at("duplicate_prob");
  b.diurnal = j.at("diurnal");
  b.default_image_prob = j.at("default_image_prob");
  b.digit_name_prob = j.at("digit_name_prob");
  b.verified_prob = j.at("verified_prob");
  b.hashtag_rate = j.at("hashtag_rate");
  b.url_prob = j.at("url_prob");
  b.mention_rate = j.at("mention_rate");
  b.mimic_prob = j.at("mimic_prob");
  return b;
}

Epoch epoch_from(const json& j) {
  if (j.is_number_integer()) return j.get<Epoch>();
  return corpus::parse_iso8601(j.get<std::string>());
}

// Every key of user must exist in defaults, recursively through objects.
void check_keys(const json& user, const json& defaults, const std::string& prefix) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!defaults.contains(it.key())) {
      fail(ErrorCode::kInvalidArgument, "unknown config key: " + key);
    }
    const json& d = defaults.at(it.key());
    if (d.is_object()) {
      if (!it->is_object()) fail(ErrorCode::kInvalidArgument, "config key must be an object: " + key);
      check_keys(*it, d, key);
    }
  }
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    fail(ErrorCode::kInvalidArgument, "override must look like key=value: " + assignment);
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json* node = &j;
  std::size_t pos = 0;
  while (true) {
    const auto dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (!node->is_object() || !node->contains(part)) {
      fail(ErrorCode::kInvalidArgument, "unknown config key: " + key);
    }
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  if (node->is_string() && !value.is_string()) value = raw;
  *node = value;
}

}  // namespace

std::string PipelineConfig::to_json() const {
  json j;
  j["paths"] = {{"tweets", paths.tweets.string()},
                {"snapshots", paths.snapshots.string()},
                {"labels", paths.labels.string()},
                {"embeddings", paths.embeddings.string()},
                {"toxicity_scores", paths.toxicity_scores.string()},
                {"synth_out", paths.synth_out.string()},
                {"workdir", paths.workdir.string()}};
  j["window"] = {{"start", corpus::format_iso8601(window_start)}, {"days", window_days}};
  std::vector<std::string> fam;
  for (auto f : families) fam.emplace_back(model::to_string(f));
  j["families"] = fam;
  j["balance"] = balance;
  j["seed"] = seed;
  j["threads"] = threads;
  j["text"] = {{"provider", text.provider},
               {"encoder_dim", text.encoder_dim},
               {"clustering_dim", text.clustering_dim},
               {"feature_dim", text.feature_dim},
               {"pca_max_rows", text.pca_max_rows}};
  j["cluster"] = {{"tau", cluster.tau},
                  {"sample_n", cluster.sample_n},
                  {"keywords", cluster.keywords},
                  {"toxicity_threshold", cluster.toxicity_threshold},
                  {"digest_top", cluster.digest_top}};
  j["graph"] = {{"dim", graph.dim},
                {"epochs", graph.epochs},
                {"learning_rate", graph.learning_rate},
                {"negatives", graph.negatives},
                {"batch_size", graph.batch_size},
                {"holdout", graph.holdout},
                {"eval_negatives", graph.eval_negatives},
                {"filtered", graph.filtered},
                {"hogwild", graph.hogwild},
                {"dims_sweep", graph.dims_sweep}};
  const auto& g = model.params.gbdt;
  const auto& l = model.params.logistic;
  j["model"] = {{"kind", model::to_string(model.kind)},
                {"k_folds", model.k_folds},
                {"selection_threshold", model.selection_threshold},
                {"test_fraction", model.test_fraction},
                {"gbdt",
                 {{"rounds", g.rounds},
                  {"max_depth", g.max_depth},
                  {"learning_rate", g.learning_rate},
                  {"lambda", g.lambda},
                  {"min_child_weight", g.min_child_weight},
                  {"max_bins", g.max_bins}}},
                {"logistic", {{"l2", l.l2}, {"max_iter", l.max_iter}, {"tol", l.tol}}}};
  j["explain"] = {{"background_rows", explain.background_rows},
                  {"samples", explain.samples},
                  {"instances", explain.instances},
                  {"targets", explain.targets}};
  j["synth"] = {{"normal_users", synth.normal_users},
                {"suspended_users", synth.suspended_users},
                {"deactivated_fraction", synth.deactivated_fraction},
                {"windows", synth.windows},
                {"start", corpus::format_iso8601(synth.start)},
                {"window_days", synth.window_days},
                {"snapshots_per_window", synth.snapshots_per_window},
                {"vocabulary", synth.vocabulary},
                {"hashtag_pool", synth.hashtag_pool},
                {"trending_hashtags", synth.trending_hashtags},
                {"campaign_pool", synth.campaign_pool},
                {"drift", synth.drift},
                {"normal", behavior_json(synth.normal)},
                {"suspended", behavior_json(synth.suspended)}};
  return j.dump(2);
}

PipelineConfig PipelineConfig::parse(std::string_view json_text,
                                     std::span<const std::string> overrides) {
  const json defaults = json::parse(PipelineConfig{}.to_json());
  json user;
  try {
    user = json_text.empty() ? json::object() : json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("config is not valid JSON: ") + e.what());
  }
  if (!user.is_object()) fail(ErrorCode::kInvalidArgument, "config must be a JSON object");
  check_keys(user, defaults, "");
  json j = defaults;
  j.merge_patch(user);
  for (const auto& o : overrides) apply_override(j, o);

  PipelineConfig c;
  try {
    const auto& p = j.at("paths");
    c.paths.tweets = p.at("tweets").get<std::string>();
    c.paths.snapshots = p.at("snapshots").get<std::string>();
    c.paths.labels = p.at("labels").get<std::string>();
    c.paths.embeddings = p.at("embeddings").get<std::string>();
    c.paths.toxicity_scores = p.at("toxicity_scores").get<std::string>();
    c.paths.synth_out = p.at("synth_out").get<std::string>();
    c.paths.workdir = p.at("workdir").get<std::string>();
    c.window_start = epoch_from(j.at("window").at("start"));
    c.window_days = j.at("window").at("days");
    c.families.clear();
    for (const auto& f : j.at("families")) c.families.push_back(model::parse_family(f.get<std::string>()));
    std::sort(c.families.begin(), c.families.end());
    c.families.erase(std::unique(c.families.begin(), c.families.end()), c.families.end());
    c.balance = j.at("balance");
    c.seed = j.at("seed");
    c.threads = j.at("threads");

    const auto& t = j.at("text");
    c.text.provider = t.at("provider");
    c.text.encoder_dim = t.at("encoder_dim");
    c.text.clustering_dim = t.at("clustering_dim");
    c.text.feature_dim = t.at("feature_dim");
    c.text.pca_max_rows = t.at("pca_max_rows");

    const auto& cl = j.at("cluster");
    c.cluster.tau = cl.at("tau");
    c.cluster.sample_n = cl.at("sample_n");
    c.cluster.keywords = cl.at("keywords").get<std::vector<std::string>>();
    c.cluster.toxicity_threshold = cl.at("toxicity_threshold");
    c.cluster.digest_top = cl.at("digest_top");

    const auto& g = j.at("graph");
    c.graph.dim = g.at("dim");
    c.graph.epochs = g.at("epochs");
    c.graph.learning_rate = g.at("learning_rate");
    c.graph.negatives = g.at("negatives");
    c.graph.batch_size = g.at("batch_size");
    c.graph.holdout = g.at("holdout");
    c.graph.eval_negatives = g.at("eval_negatives");
    c.graph.filtered = g.at("filtered");
    c.graph.hogwild = g.at("hogwild");
    c.graph.dims_sweep = g.at("dims_sweep").get<std::vector<std::size_t>>();

    const auto& m = j.at("model");
    c.model.kind = model::parse_model_kind(m.at("kind").get<std::string>());
    c.model.k_folds = m.at("k_folds");
    c.model.selection_threshold = m.at("selection_threshold");
    c.model.test_fraction = m.at("test_fraction");
    const auto& gb = m.at("gbdt");
    c.model.params.gbdt.rounds = gb.at("rounds");
    c.model.params.gbdt.max_depth = gb.at("max_depth");
    c.model.params.gbdt.learning_rate = gb.at("learning_rate");
    c.model.params.gbdt.lambda = gb.at("lambda");
    c.model.params.gbdt.min_child_weight = gb.at("min_child_weight");
    c.model.params.gbdt.max_bins = gb.at("max_bins");
    const auto& lg = m.at("logistic");
    c.model.params.logistic.l2 = lg.at("l2");
    c.model.params.logistic.max_iter = lg.at("max_iter");
    c.model.params.logistic.tol = lg.at("tol");

    const auto& e = j.at("explain");
    c.explain.background_rows = e.at("background_rows");
    c.explain.samples = e.at("samples");
    c.explain.instances = e.at("instances");
    c.explain.targets = e.at("targets").get<std::vector<std::string>>();

    const auto& s = j.at("synth");
    c.synth.normal_users = s.at("normal_users");
    c.synth.suspended_users = s.at("suspended_users");
    c.synth.deactivated_fraction = s.at("deactivated_fraction");
    c.synth.windows = s.at("windows");
    c.synth.start = epoch_from(s.at("start"));
    c.synth.window_days = s.at("window_days");
    c.synth.snapshots_per_window = s.at("snapshots_per_window");
    c.synth.vocabulary = s.at("vocabulary");
    c.synth.hashtag_pool = s.at("hashtag_pool");
    c.synth.trending_hashtags = s.at("trending_hashtags");
    c.synth.campaign_pool = s.at("campaign_pool");
    c.synth.drift = s.at("drift");
    c.synth.normal = behavior_from(s.at("normal"));
    c.synth.suspended = behavior_from(s.at("suspended"));
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad config value: ") + e.what());
  }

  if (c.window_days < 1) fail(ErrorCode::kInvalidArgument, "window.days must be >= 1");
  if (c.threads < 1) fail(ErrorCode::kInvalidArgument, "threads must be >= 1");
  if (c.text.provider != "hashing" && c.text.provider != "precomputed") {
    fail(ErrorCode::kInvalidArgument, "text.provider must be hashing or precomputed");
  }
  if (!(c.cluster.tau > 0.0 && c.cluster.tau <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "cluster.tau must lie in (0, 1]");
  }
  if (c.graph.dim == 0 || c.graph.epochs < 0) {
    fail(ErrorCode::kInvalidArgument, "graph.dim must be >= 1 and epochs >= 0");
  }
  if (c.model.k_folds < 2) fail(ErrorCode::kInvalidArgument, "model.k_folds must be >= 2");
  if (c.families.empty()) fail(ErrorCode::kInvalidArgument, "at least one family is required");
  c.synth.validate();
  c.model.params.threads = c.threads;
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path,
                                    std::span<const std::string> overrides) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const Error&) {
    fail(ErrorCode::kInvalidArgument, "cannot read config file " + path.string());
  }
  return parse(text, overrides);
}

std::string PipelineConfig::hash() const {
  json j = json::parse(to_json());
  j.erase("paths");
  j.erase("threads");
  return io::sha256_hex(j.dump());
}

std::vector<std::string> model_targets(const PipelineConfig& c) {
  std::vector<std::string> out;
  for (auto f : c.families) out.emplace_back(model::to_string(f));
  out.emplace_back("combination");
  return out;
}

}  // namespace susp::pipeline

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
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "susp/synth.hpp"

namespace {

using namespace susp;
using namespace susp::synth;
using testutil::code_of;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

GeneratorConfig small_config() {
  GeneratorConfig c;
  c.normal_users = 40;
  c.suspended_users = 40;
  return c;
}

TEST(Synth, DefaultConfigSeedSevenIsReproducible) {
  testutil::TempDir a, b;
  const GeneratorConfig c;
  write_corpus(generate(c, 7), default_paths(a.path()));
  write_corpus(generate(c, 7), default_paths(b.path()));
  for (const char* f : {"tweets.jsonl", "snapshots.jsonl", "labels.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_FALSE(slurp(a / f).empty()) << f;
  }
  const auto other = generate(c, 8);
  EXPECT_NE(other.tweets.front().text + other.tweets.back().text,
            generate(c, 7).tweets.front().text + generate(c, 7).tweets.back().text);
}

TEST(Synth, SaturatedDuplicationSharesOneText) {
  auto c = small_config();
  c.windows = 1;
  c.campaign_pool = 1;
  c.suspended.duplicate_prob = 1.0;
  c.suspended.mimic_prob = 0.0;
  const auto g = generate(c, 3);
  std::set<std::string> suspended;
  for (const auto& l : g.labels) {
    if (l.status == corpus::AccountStatus::kSuspended) suspended.insert(l.user_id);
  }
  std::set<std::string> texts, posting;
  for (const auto& t : g.tweets) {
    if (!suspended.contains(t.user_id)) continue;
    texts.insert(t.text);
    posting.insert(t.user_id);
  }
  EXPECT_EQ(texts.size(), 1u);
  EXPECT_GT(posting.size(), suspended.size() / 2);
}

TEST(Synth, ZeroNormalUsersLabelsOnlySuspended) {
  auto c = small_config();
  c.normal_users = 0;
  const auto g = generate(c, 1);
  ASSERT_EQ(g.labels.size(), 80u);
  for (const auto& l : g.labels) EXPECT_EQ(l.status, corpus::AccountStatus::kSuspended);
}

TEST(Synth, InvalidKnobs) {
  auto c = small_config();
  c.suspended.retweet_prob = 1.5;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::kInvalidArgument);
  c = small_config();
  c.normal.statuses_per_day = -1;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::kInvalidArgument);
}

TEST(Synth, RoundTripsThroughIngestion) {
  testutil::TempDir dir;
  const auto g = generate(small_config(), 5);
  const auto paths = default_paths(dir.path());
  write_corpus(g, paths);
  corpus::CorpusBuilder b;
  const auto t = b.ingest_tweets_file(paths.tweets);
  const auto s = b.ingest_snapshots_file(paths.snapshots);
  const auto l = b.ingest_labels_file(paths.labels);
  EXPECT_EQ(t.skipped, 0u);
  EXPECT_EQ(s.skipped, 0u);
  EXPECT_EQ(l.skipped, 0u);
  EXPECT_EQ(t.parsed, g.tweets.size());
  EXPECT_EQ(s.parsed, g.snapshots.size());
  EXPECT_EQ(l.parsed, g.labels.size());
  const auto corpus = std::move(b).build();
  EXPECT_EQ(corpus.labels().size(), g.labels.size());
}

// Checks generated suspended users against the class knobs, each statistic
// within three standard errors of its configured expectation.
TEST(Synth, SuspendedStatisticsMatchKnobs) {
  GeneratorConfig c;
  c.normal_users = 0;
  c.deactivated_fraction = 0.0;
  c.suspended_users = 600;
  c.windows = 1;
  c.suspended.mimic_prob = 0.0;
  const auto g = generate(c, 21);
  const auto& b = c.suspended;
  const Epoch wend = c.start + static_cast<Epoch>(c.window_days) * kSecondsPerDay;
  const double day = static_cast<double>(kSecondsPerDay);

  std::map<std::string, Epoch> created;
  for (const auto& s : g.snapshots) created[s.user_id] = s.account_created_at;
  ASSERT_EQ(created.size(), 600u);
  double age_excess = 0;
  for (const auto& [u, t] : created) {
    age_excess += static_cast<double>(wend - t) / day - b.account_age_min_days;
  }
  const double n = static_cast<double>(created.size());
  // Exponential: sd equals the mean. Creation times are truncated to seconds.
  EXPECT_NEAR(age_excess / n, b.account_age_mean_days, 3 * b.account_age_mean_days / std::sqrt(n) + 1e-3);

  double log_sum = 0, log_n = 0;
  std::map<std::string, double> posts;
  for (const auto& t : g.tweets) {
    posts[t.user_id] += 1;
    if (t.kind != corpus::TweetKind::kRetweet || !t.referenced_created_at) continue;
    const auto delay = t.created_at - *t.referenced_created_at;
    if (delay < 1) continue;
    log_sum += std::log(static_cast<double>(delay));
    log_n += 1;
  }
  ASSERT_GT(log_n, 1000);
  EXPECT_NEAR(log_sum / log_n, b.reaction_log_mean, 3 * b.reaction_log_sigma / std::sqrt(log_n) + 0.01);

  // Posts are Poisson over each user's collection span.
  double expected = 0, observed = 0;
  for (const auto& l : g.labels) {
    const Epoch from = std::max(c.start, created[l.user_id] + 60);
    const Epoch to = *l.status_date;
    if (to > from) expected += b.observed_posts_per_day * static_cast<double>(to - from) / day;
    observed += posts[l.user_id];
  }
  EXPECT_NEAR(observed, expected, 3 * std::sqrt(expected));
}

}  // namespace

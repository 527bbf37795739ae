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

#include <fstream>

#include "helpers.hpp"
#include "susp/corpus.hpp"
#include "susp/io.hpp"
#include "susp/random.hpp"

namespace {

using namespace susp;
using namespace susp::corpus;
using testutil::kT0;
using testutil::code_of;

TEST(TweetRecord, KindFromReferenceFields) {
  const auto rt = parse_tweet_record(
      R"({"id":"1","user_id":"u","created_at":100,"text":"x","retweeted_status_id":"9",)"
      R"("retweeted_user_id":"v","retweeted_status_created_at":40})");
  EXPECT_EQ(rt.kind, TweetKind::kRetweet);
  EXPECT_EQ(rt.referenced_user_id.value(), "v");
  EXPECT_EQ(rt.referenced_created_at.value(), 40);

  const auto orig = parse_tweet_record(R"({"id":"2","user_id":"u","created_at":100,"text":"x"})");
  EXPECT_EQ(orig.kind, TweetKind::kOriginal);
  EXPECT_FALSE(orig.referenced_tweet_id.has_value());

  const auto q = parse_tweet_record(
      R"({"id":"3","user_id":"u","created_at":100,"text":"x","quoted_status_id":"8",)"
      R"("quoted_user_id":"w","quoted_status_created_at":"1970-01-01T00:01:00Z"})");
  EXPECT_EQ(q.kind, TweetKind::kQuote);
  EXPECT_EQ(q.referenced_created_at.value(), 60);
}

TEST(TweetRecord, MissingIdIsMalformed) {
  EXPECT_EQ(code_of([] { parse_tweet_record(R"({"user_id":"u","created_at":1,"text":"x"})"); }),
            ErrorCode::kMalformedRecord);
  EXPECT_EQ(code_of([] { parse_tweet_record("not json"); }), ErrorCode::kMalformedRecord);
}

TEST(TweetRecord, JsonLineRoundTrip) {
  auto t = testutil::tweet("42", "u1", kT0, TweetKind::kQuote, "text #tag", 30, "u2");
  t.hashtags = {"tag"};
  t.mentions = {"u2"};
  t.urls = {"https://t.co/x"};
  const auto back = parse_tweet_record(to_json_line(t));
  EXPECT_EQ(back.tweet_id, t.tweet_id);
  EXPECT_EQ(back.kind, t.kind);
  EXPECT_EQ(back.referenced_created_at, t.referenced_created_at);
  EXPECT_EQ(back.hashtags, t.hashtags);
  EXPECT_EQ(back.mentions, t.mentions);
  EXPECT_EQ(back.urls, t.urls);
  EXPECT_EQ(back.text, t.text);
}

TEST(Windows, SplitFromCorpusStart) {
  const auto [w1, w2] = split_windows(parse_iso8601("2022-02-23"), 21);
  EXPECT_EQ(w1.start, parse_iso8601("2022-02-23T00:00:00Z"));
  EXPECT_EQ(w1.end, parse_iso8601("2022-03-16"));
  EXPECT_EQ(w2.start, parse_iso8601("2022-03-16"));
  EXPECT_EQ(w2.end, parse_iso8601("2022-04-06"));
}

TEST(Windows, OneDayAndZeroDays) {
  const Epoch t = 1000000;
  const auto [a, b] = split_windows(t, 1);
  EXPECT_EQ(a.start, t);
  EXPECT_EQ(a.end, t + 86400);
  EXPECT_EQ(b.start, t + 86400);
  EXPECT_EQ(b.end, t + 172800);
  EXPECT_EQ(code_of([] { split_windows(0, 0); }), ErrorCode::kInvalidArgument);
}

TEST(Windows, NoTimestampInBoth) {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const Epoch start = static_cast<Epoch>(rng.uniform_index(2000000000));
    const int days = 1 + static_cast<int>(rng.uniform_index(40));
    const auto [a, b] = split_windows(start, days);
    for (int k = 0; k < 200; ++k) {
      const Epoch t = a.start + static_cast<Epoch>(rng.uniform_index(
                                    static_cast<std::uint64_t>(b.end - a.start + 10)));
      EXPECT_FALSE(a.contains(t) && b.contains(t));
    }
    EXPECT_FALSE(a.contains(a.end));
    EXPECT_TRUE(b.contains(a.end));
  }
}

TEST(Iso8601, OffsetsAndFormat) {
  EXPECT_EQ(parse_iso8601("2022-02-23T01:00:00+01:00"), kT0);
  EXPECT_EQ(parse_iso8601("2022-02-23T00:00:00.750Z"), kT0);
  EXPECT_EQ(format_iso8601(kT0), "2022-02-23T00:00:00Z");
  EXPECT_EQ(parse_iso8601(format_iso8601(kT0 + 12345)), kT0 + 12345);
}

Corpus window_fixture() {
  const auto [w1, w2] = split_windows(kT0, 21);
  CorpusBuilder b;
  b.add_tweet(testutil::tweet("1", "susp", kT0 + 100));
  b.add_tweet(testutil::tweet("2", "norm", kT0 + 200));
  b.add_tweet(testutil::tweet("3", "deact", kT0 + 300));
  b.add_tweet(testutil::tweet("4", "late", w2.start + 10));
  b.add_tweet(testutil::tweet("5", "unlabeled", kT0 + 400));
  b.add_label(testutil::label("susp", AccountStatus::kSuspended, kT0 + 5 * 86400));
  b.add_label(testutil::label("norm", AccountStatus::kNormal));
  b.add_label(testutil::label("deact", AccountStatus::kDeactivated, kT0 + 86400));
  b.add_label(testutil::label("late", AccountStatus::kNormal));
  b.add_label(testutil::label("quiet", AccountStatus::kNormal));
  return std::move(b).build();
}

TEST(WindowUsers, Membership) {
  const Corpus c = window_fixture();
  const auto [w1, w2] = split_windows(kT0, 21);
  const auto users = select_window_users(c, w1);
  std::map<std::string, int> got;
  for (const auto& u : users) got[u.user_id] = u.label;
  EXPECT_EQ(got.count("susp"), 1u);
  EXPECT_EQ(got["susp"], 1);
  EXPECT_EQ(got["norm"], 0);
  EXPECT_EQ(got["unlabeled"], 0);
  EXPECT_EQ(got.count("deact"), 0u);
  EXPECT_EQ(got.count("late"), 0u);
  EXPECT_EQ(got.count("quiet"), 0u);
  EXPECT_TRUE(std::is_sorted(users.begin(), users.end(),
                             [](auto& a, auto& b) { return a.user_id < b.user_id; }));
}

LabeledUsers make_users(int pos, int neg) {
  LabeledUsers u;
  for (int i = 0; i < pos; ++i) u.push_back({"p" + std::to_string(i), 1});
  for (int i = 0; i < neg; ++i) u.push_back({"n" + std::to_string(i), 0});
  return u;
}

TEST(Balance, MinorityRule) {
  const auto out = undersample_balance(make_users(5, 100), 11);
  int pos = 0;
  for (const auto& u : out) pos += u.label;
  EXPECT_EQ(pos, 5);
  EXPECT_EQ(out.size(), 10u);

  auto same = make_users(5, 5);
  auto kept = undersample_balance(same, 1);
  std::sort(same.begin(), same.end(), [](auto& a, auto& b) { return a.user_id < b.user_id; });
  EXPECT_EQ(kept, same);

  EXPECT_EQ(undersample_balance(make_users(5, 100), 11), out);
  EXPECT_EQ(code_of([] { undersample_balance(make_users(0, 4), 1); }), ErrorCode::kEmptyClass);
}

TEST(Balance, CountsAlwaysEqual) {
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const int p = 1 + static_cast<int>(rng.uniform_index(60));
    const int n = 1 + static_cast<int>(rng.uniform_index(60));
    const auto out = undersample_balance(make_users(p, n), rng.next_u64());
    int pos = 0;
    for (const auto& u : out) pos += u.label;
    EXPECT_EQ(static_cast<std::size_t>(2 * pos), out.size());
    EXPECT_EQ(pos, std::min(p, n));
  }
}

TEST(Timeline, WindowOrderAndTies) {
  const auto [w1, w2] = split_windows(kT0, 21);
  CorpusBuilder b;
  b.add_tweet(testutil::tweet("30", "u", kT0 + 300));
  b.add_tweet(testutil::tweet("10", "u", kT0 + 100));
  b.add_tweet(testutil::tweet("20", "u", kT0 + 200));
  b.add_tweet(testutil::tweet("99", "u", w2.start + 5));
  b.add_tweet(testutil::tweet("b", "tie", kT0 + 50));
  b.add_tweet(testutil::tweet("a", "tie", kT0 + 50));
  b.add_tweet(testutil::tweet("x", "outside", w2.start + 50));
  const Corpus c = std::move(b).build();
  const auto t = c.user_timeline("u", w1);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0].tweet_id, "10");
  EXPECT_EQ(t[1].tweet_id, "20");
  EXPECT_EQ(t[2].tweet_id, "30");
  EXPECT_TRUE(c.user_timeline("outside", w1).empty());
  const auto tie = c.user_timeline("tie", w1);
  ASSERT_EQ(tie.size(), 2u);
  EXPECT_EQ(tie[0].tweet_id, "a");
  EXPECT_EQ(tie[1].tweet_id, "b");
}

TEST(Store, IngestIsIdempotentAndCountsLines) {
  testutil::TempDir dir;
  const auto tweets = dir / "tweets.jsonl";
  {
    std::ofstream f(tweets);
    f << to_json_line(testutil::tweet("1", "u", kT0 + 1)) << '\n';
    f << "{broken\n";
    f << to_json_line(testutil::tweet("2", "u", kT0 + 2, TweetKind::kRetweet)) << '\n';
    f << R"({"user_id":"u","created_at":3,"text":"no id"})" << '\n';
    f << to_json_line(testutil::tweet("1", "u", kT0 + 1)) << '\n';
  }
  CorpusStore store(dir / "c.sqlite");
  const auto s1 = store.ingest_tweets_file(tweets);
  EXPECT_EQ(s1.parsed + s1.skipped, 5u);
  EXPECT_EQ(s1.skipped, 2u);
  EXPECT_EQ(store.tweet_count(), 2u);
  const auto s2 = store.ingest_tweets_file(tweets);
  EXPECT_EQ(s2.parsed + s2.skipped, 5u);
  EXPECT_EQ(store.tweet_count(), 2u);

  const Corpus c = store.load();
  EXPECT_EQ(c.tweet_count(), 2u);
  ASSERT_NE(c.find_tweet("2"), nullptr);
  EXPECT_EQ(c.find_tweet("2")->kind, TweetKind::kRetweet);
  EXPECT_EQ(c.find_tweet("2")->referenced_created_at.value(), kT0 + 2 - 60);
}

TEST(Store, SnapshotsAndLabelsRoundTrip) {
  testutil::TempDir dir;
  {
    std::ofstream f(dir / "snaps.jsonl");
    f << to_json_line(testutil::snapshot("u", kT0 + 10, kT0 - 86400, 4)) << '\n';
    f << to_json_line(testutil::snapshot("u", kT0 + 20, kT0 - 86400, 6)) << '\n';
    std::ofstream l(dir / "labels.csv");
    l << "user_id,status,status_date\n";
    l << to_csv_row(testutil::label("u", AccountStatus::kSuspended, kT0 + 50)) << '\n';
    l << "v,normal,\n";
  }
  CorpusStore store(dir / "c.sqlite");
  EXPECT_EQ(store.ingest_snapshots_file(dir / "snaps.jsonl").parsed, 2u);
  EXPECT_EQ(store.ingest_labels_file(dir / "labels.csv").parsed, 2u);
  const Corpus c = store.load();
  EXPECT_EQ(c.snapshot_count(), 2u);
  ASSERT_NE(c.label("u"), nullptr);
  EXPECT_EQ(c.label("u")->status, AccountStatus::kSuspended);
  EXPECT_EQ(c.label("u")->status_date.value(), kT0 + 50);
  EXPECT_EQ(c.label("v")->status, AccountStatus::kNormal);
}

}  // namespace

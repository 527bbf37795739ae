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

#ifndef SUSP_CORPUS_HPP_
#define SUSP_CORPUS_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "susp/common.hpp"

namespace susp::corpus {

enum class TweetKind : std::uint8_t { kOriginal = 0, kRetweet = 1, kQuote = 2 };

inline constexpr std::array<TweetKind, 3> kAllKinds = {
    TweetKind::kOriginal, TweetKind::kRetweet, TweetKind::kQuote};

// "tweet", "retweet", "quote": the column prefixes used by feature families.
std::string_view kind_label(TweetKind kind);

struct Tweet {
  std::string tweet_id;
  std::string user_id;
  Epoch created_at = 0;
  TweetKind kind = TweetKind::kOriginal;
  std::optional<std::string> referenced_tweet_id;
  std::optional<std::string> referenced_user_id;
  std::optional<Epoch> referenced_created_at;
  std::string text;
  std::vector<std::string> hashtags;
  std::vector<std::string> urls;
  std::vector<std::string> mentions;
  std::string lang = "und";
};

struct UserSnapshot {
  std::string user_id;
  Epoch observed_at = 0;
  Epoch account_created_at = 0;
  std::int64_t followers = 0;
  std::int64_t friends = 0;
  std::int64_t statuses = 0;
  std::int64_t favourites = 0;
  std::int64_t listed = 0;
  bool verified = false;
  bool default_profile_image = false;
  bool default_profile = false;
  std::string name;
  std::string screen_name;
  std::string description;
};

enum class AccountStatus : std::uint8_t { kNormal, kSuspended, kDeactivated };

std::string_view to_string(AccountStatus status);

struct AccountLabel {
  std::string user_id;
  AccountStatus status = AccountStatus::kNormal;
  std::optional<Epoch> status_date;
};

// Half-open interval [start, end).
struct TimeWindow {
  Epoch start = 0;
  Epoch end = 0;

  static TimeWindow make(Epoch start, Epoch end);
  bool contains(Epoch t) const { return t >= start && t < end; }
  double days() const {
    return static_cast<double>(end - start) / static_cast<double>(kSecondsPerDay);
  }
  bool operator==(const TimeWindow&) const = default;
};

std::pair<TimeWindow, TimeWindow> split_windows(Epoch corpus_start,
                                                int window_days = 21);

// Accepts YYYY-MM-DD with optional THH:MM:SS[.frac] and Z or +-HH[:]MM.
Epoch parse_iso8601(std::string_view s);
std::string format_iso8601(Epoch t);

// Every parse_* function throws Error{kMalformedRecord}.
Tweet parse_tweet_record(std::string_view line);
UserSnapshot parse_snapshot_record(std::string_view line);
// One CSV row "user_id,status,status_date". Does not accept the header.
AccountLabel parse_label_row(std::string_view line);

std::string to_json_line(const Tweet& t);
std::string to_json_line(const UserSnapshot& s);
std::string to_csv_row(const AccountLabel& l);

struct ParseStats {
  std::size_t parsed = 0;
  std::size_t skipped = 0;
  std::size_t duplicates = 0;
  // First few skip reasons, for diagnostics.
  std::vector<std::string> warnings;

  void note_skip(std::size_t line_no, const std::string& why);
};

class Corpus;

// Single-writer ingestion. Duplicate tweet ids and duplicate
// (user_id, observed_at) snapshots are ignored, so re-ingesting a file is a
// no-op. Labels: the last row per user wins.
class CorpusBuilder {
 public:
  bool add_tweet(Tweet t);
  bool add_snapshot(UserSnapshot s);
  void add_label(AccountLabel l);

  ParseStats ingest_tweets_file(const std::filesystem::path& path);
  ParseStats ingest_snapshots_file(const std::filesystem::path& path);
  ParseStats ingest_labels_file(const std::filesystem::path& path);

  Corpus build() &&;

 private:
  std::vector<Tweet> tweets_;
  std::unordered_set<std::string> tweet_ids_;
  std::vector<UserSnapshot> snapshots_;
  std::unordered_set<std::string> snapshot_keys_;
  std::map<std::string, AccountLabel, std::less<>> labels_;
};

// Immutable, indexed view of an ingested corpus. Safe for concurrent reads.
class Corpus {
 public:
  Corpus() = default;

  // Tweets by user with created_at in window, ascending by (created_at,
  // tweet_id). Unknown users yield an empty span.
  std::span<const Tweet> user_timeline(std::string_view user_id,
                                       TimeWindow window) const;
  std::span<const Tweet> user_timeline(std::string_view user_id) const;

  // Snapshots with observed_at in window, ascending by observed_at.
  std::span<const UserSnapshot> snapshots(std::string_view user_id,
                                          TimeWindow window) const;

  const AccountLabel* label(std::string_view user_id) const;
  const std::map<std::string, AccountLabel, std::less<>>& labels() const {
    return labels_;
  }

  // Every user with at least one tweet or snapshot, sorted.
  std::vector<std::string> user_ids() const;
  std::vector<std::string> active_users(TimeWindow window) const;
  bool active_in(std::string_view user_id, TimeWindow window) const;

  const Tweet* find_tweet(std::string_view tweet_id) const;

  std::size_t tweet_count() const { return tweet_count_; }
  std::size_t snapshot_count() const { return snapshot_count_; }

 private:
  friend class CorpusBuilder;

  struct UserData {
    std::vector<Tweet> tweets;
    std::vector<UserSnapshot> snapshots;
  };

  std::map<std::string, UserData, std::less<>> users_;
  std::map<std::string, AccountLabel, std::less<>> labels_;
  // tweet_id -> (user_id, position in that user's timeline)
  std::map<std::string, std::pair<std::string, std::size_t>, std::less<>>
      tweet_index_;
  std::size_t tweet_count_ = 0;
  std::size_t snapshot_count_ = 0;
};

// Embedded single-file store (SQLite). Append-only ingestion keyed by
// tweet_id; indexed by (user_id, created_at).
class CorpusStore {
 public:
  explicit CorpusStore(const std::filesystem::path& path);
  ~CorpusStore();
  CorpusStore(const CorpusStore&) = delete;
  CorpusStore& operator=(const CorpusStore&) = delete;

  ParseStats ingest_tweets_file(const std::filesystem::path& path);
  ParseStats ingest_snapshots_file(const std::filesystem::path& path);
  ParseStats ingest_labels_file(const std::filesystem::path& path);

  std::size_t tweet_count() const;
  Corpus load() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct LabeledUser {
  std::string user_id;
  int label = 0;  // 1 = suspended, 0 = normal

  bool operator==(const LabeledUser&) const = default;
};

using LabeledUsers = std::vector<LabeledUser>;

// Suspended users whose status_date lies in window, plus normal users with
// activity in window. Unlabeled active users count as normal; deactivated
// users are excluded. Sorted by user_id.
LabeledUsers select_window_users(const Corpus& corpus, TimeWindow window);

// Uniform under-sampling of the majority class to the minority-class size.
// Throws Error{kEmptyClass}. Output sorted by user_id.
LabeledUsers undersample_balance(std::span<const LabeledUser> users,
                                 std::uint64_t seed);

}  // namespace susp::corpus

#endif  // SUSP_CORPUS_HPP_

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

#include "susp/corpus.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <nlohmann/json.hpp>

#include "susp/io.hpp"
#include "susp/random.hpp"

namespace susp::corpus {

using nlohmann::json;

std::string_view kind_label(TweetKind kind) {
  switch (kind) {
    case TweetKind::kOriginal: return "tweet";
    case TweetKind::kRetweet: return "retweet";
    case TweetKind::kQuote: return "quote";
  }
  return "tweet";
}

std::string_view to_string(AccountStatus status) {
  switch (status) {
    case AccountStatus::kNormal: return "normal";
    case AccountStatus::kSuspended: return "suspended";
    case AccountStatus::kDeactivated: return "deactivated";
  }
  return "normal";
}

TimeWindow TimeWindow::make(Epoch start, Epoch end) {
  if (!(start < end)) {
    fail(ErrorCode::kInvalidArgument, "time window requires start < end");
  }
  return TimeWindow{start, end};
}

std::pair<TimeWindow, TimeWindow> split_windows(Epoch corpus_start,
                                                int window_days) {
  if (window_days < 1) {
    fail(ErrorCode::kInvalidArgument, "window_days must be >= 1");
  }
  const Epoch len = static_cast<Epoch>(window_days) * kSecondsPerDay;
  const TimeWindow first = TimeWindow::make(corpus_start, corpus_start + len);
  const TimeWindow second = TimeWindow::make(first.end, first.end + len);
  return {first, second};
}

namespace {

[[noreturn]] void malformed(const std::string& why) {
  fail(ErrorCode::kMalformedRecord, why);
}

int parse_fixed_int(std::string_view s, std::size_t pos, std::size_t len) {
  if (pos + len > s.size()) malformed("truncated timestamp");
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') malformed("bad digit in timestamp");
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

}  // namespace

Epoch parse_iso8601(std::string_view s) {
  using namespace std::chrono;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') {
    malformed("bad ISO-8601 date: '" + std::string(s) + "'");
  }
  const int y = parse_fixed_int(s, 0, 4);
  const int mo = parse_fixed_int(s, 5, 2);
  const int d = parse_fixed_int(s, 8, 2);
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) malformed("invalid calendar date: '" + std::string(s) + "'");
  Epoch t = static_cast<Epoch>(sys_days{ymd}.time_since_epoch().count()) *
            kSecondsPerDay;
  std::size_t pos = 10;
  if (pos < s.size() && (s[pos] == 'T' || s[pos] == ' ')) {
    const int hh = parse_fixed_int(s, pos + 1, 2);
    if (pos + 3 >= s.size() || s[pos + 3] != ':') malformed("bad time");
    const int mm = parse_fixed_int(s, pos + 4, 2);
    int ss = 0;
    pos += 6;
    if (pos < s.size() && s[pos] == ':') {
      ss = parse_fixed_int(s, pos + 1, 2);
      pos += 3;
    }
    if (hh > 23 || mm > 59 || ss > 60) malformed("time out of range");
    t += hh * 3600 + mm * 60 + ss;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    }
    if (pos < s.size()) {
      if (s[pos] == 'Z') {
        ++pos;
      } else if (s[pos] == '+' || s[pos] == '-') {
        const int sign = s[pos] == '+' ? 1 : -1;
        const int oh = parse_fixed_int(s, pos + 1, 2);
        pos += 3;
        if (pos < s.size() && s[pos] == ':') ++pos;
        const int om = parse_fixed_int(s, pos, 2);
        pos += 2;
        // Local time = UTC + offset.
        t -= sign * (oh * 3600 + om * 60);
      }
    }
  }
  if (pos != s.size()) malformed("trailing characters in timestamp");
  return t;
}

std::string format_iso8601(Epoch t) {
  using namespace std::chrono;
  Epoch days_since = t / kSecondsPerDay;
  Epoch rem = t % kSecondsPerDay;
  if (rem < 0) {
    rem += kSecondsPerDay;
    --days_since;
  }
  const year_month_day ymd{sys_days{days{days_since}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                static_cast<int>((rem / 60) % 60), static_cast<int>(rem % 60));
  return buf;
}

namespace {

json parse_object(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    malformed(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) malformed("record is not a JSON object");
  return j;
}

bool present(const json& j, const char* key) {
  auto it = j.find(key);
  return it != j.end() && !it->is_null();
}

std::string id_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    malformed(std::string("missing required field '") + key + "'");
  }
  if (it->is_string()) {
    auto s = it->get<std::string>();
    if (s.empty()) malformed(std::string("empty id field '") + key + "'");
    return s;
  }
  if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
  malformed(std::string("field '") + key + "' must be a string id");
}

Epoch time_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    malformed(std::string("missing required field '") + key + "'");
  }
  if (it->is_number_integer()) return it->get<Epoch>();
  if (it->is_number_float()) return static_cast<Epoch>(it->get<double>());
  if (it->is_string()) return parse_iso8601(it->get<std::string>());
  malformed(std::string("field '") + key + "' must be a timestamp");
}

std::int64_t count_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return 0;
  if (!it->is_number()) {
    malformed(std::string("field '") + key + "' must be numeric");
  }
  const auto v = it->get<std::int64_t>();
  if (v < 0) malformed(std::string("negative count '") + key + "'");
  return v;
}

bool bool_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return false;
  if (it->is_boolean()) return it->get<bool>();
  if (it->is_number()) return it->get<double>() != 0.0;
  malformed(std::string("field '") + key + "' must be boolean");
}

std::string string_field(const json& j, const char* key, bool required) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (required) {
      malformed(std::string("missing required field '") + key + "'");
    }
    return {};
  }
  if (!it->is_string()) {
    malformed(std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::vector<std::string> string_list(const json& j, const char* key,
                                     bool strip_hash) {
  std::vector<std::string> out;
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return out;
  if (!it->is_array()) malformed(std::string("field '") + key + "' not array");
  for (const auto& v : *it) {
    std::string s;
    if (v.is_string()) {
      s = v.get<std::string>();
    } else if (v.is_number_integer()) {
      s = std::to_string(v.get<std::int64_t>());
    } else {
      malformed(std::string("non-string element in '") + key + "'");
    }
    if (strip_hash && !s.empty() && s.front() == '#') s.erase(0, 1);
    if (!s.empty()) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

Tweet parse_tweet_record(std::string_view line) {
  const json j = parse_object(line);
  Tweet t;
  t.tweet_id = id_field(j, "id");
  t.user_id = id_field(j, "user_id");
  t.created_at = time_field(j, "created_at");
  t.text = string_field(j, "text", true);
  if (present(j, "retweeted_status_id")) {
    t.kind = TweetKind::kRetweet;
    t.referenced_tweet_id = id_field(j, "retweeted_status_id");
    t.referenced_user_id = id_field(j, "retweeted_user_id");
    t.referenced_created_at = time_field(j, "retweeted_status_created_at");
  } else if (present(j, "quoted_status_id")) {
    t.kind = TweetKind::kQuote;
    t.referenced_tweet_id = id_field(j, "quoted_status_id");
    t.referenced_user_id = id_field(j, "quoted_user_id");
    t.referenced_created_at = time_field(j, "quoted_status_created_at");
  }
  t.hashtags = string_list(j, "hashtags", true);
  t.urls = string_list(j, "urls", false);
  t.mentions = string_list(j, "mentions", false);
  if (auto lang = string_field(j, "lang", false); !lang.empty()) {
    t.lang = std::move(lang);
  }
  return t;
}

UserSnapshot parse_snapshot_record(std::string_view line) {
  const json j = parse_object(line);
  UserSnapshot s;
  s.user_id = id_field(j, "user_id");
  s.observed_at = time_field(j, "observed_at");
  s.account_created_at = time_field(j, "account_created_at");
  if (s.account_created_at > s.observed_at) {
    malformed("account_created_at after observed_at");
  }
  s.followers = count_field(j, "followers");
  s.friends = count_field(j, "friends");
  s.statuses = count_field(j, "statuses");
  s.favourites = count_field(j, "favourites");
  s.listed = count_field(j, "listed");
  s.verified = bool_field(j, "verified");
  s.default_profile = bool_field(j, "default_profile");
  s.default_profile_image = bool_field(j, "default_profile_image");
  s.name = string_field(j, "name", false);
  s.screen_name = string_field(j, "screen_name", false);
  s.description = string_field(j, "description", false);
  return s;
}

AccountLabel parse_label_row(std::string_view line) {
  const auto fields = io::split_csv_line(line);
  if (fields.size() < 2 || fields.size() > 3 || fields[0].empty()) {
    malformed("label row must be user_id,status,status_date");
  }
  AccountLabel l;
  l.user_id = fields[0];
  const std::string& st = fields[1];
  if (st == "normal") {
    l.status = AccountStatus::kNormal;
  } else if (st == "suspended") {
    l.status = AccountStatus::kSuspended;
  } else if (st == "deactivated") {
    l.status = AccountStatus::kDeactivated;
  } else {
    malformed("unknown status '" + st + "'");
  }
  if (fields.size() == 3 && !fields[2].empty()) {
    const std::string& d = fields[2];
    Epoch v = 0;
    auto res = std::from_chars(d.data(), d.data() + d.size(), v);
    if (res.ec == std::errc() && res.ptr == d.data() + d.size()) {
      l.status_date = v;
    } else {
      l.status_date = parse_iso8601(d);
    }
  }
  if (l.status != AccountStatus::kNormal && !l.status_date) {
    malformed("status '" + st + "' requires status_date");
  }
  return l;
}

std::string to_json_line(const Tweet& t) {
  json j;
  j["id"] = t.tweet_id;
  j["user_id"] = t.user_id;
  j["created_at"] = t.created_at;
  j["text"] = t.text;
  if (t.kind == TweetKind::kRetweet) {
    j["retweeted_status_id"] = t.referenced_tweet_id.value_or("");
    j["retweeted_user_id"] = t.referenced_user_id.value_or("");
    j["retweeted_status_created_at"] = t.referenced_created_at.value_or(0);
  } else if (t.kind == TweetKind::kQuote) {
    j["quoted_status_id"] = t.referenced_tweet_id.value_or("");
    j["quoted_user_id"] = t.referenced_user_id.value_or("");
    j["quoted_status_created_at"] = t.referenced_created_at.value_or(0);
  }
  j["hashtags"] = t.hashtags;
  j["urls"] = t.urls;
  j["mentions"] = t.mentions;
  j["lang"] = t.lang;
  return j.dump();
}

std::string to_json_line(const UserSnapshot& s) {
  json j;
  j["user_id"] = s.user_id;
  j["observed_at"] = s.observed_at;
  j["account_created_at"] = s.account_created_at;
  j["followers"] = s.followers;
  j["friends"] = s.friends;
  j["statuses"] = s.statuses;
  j["favourites"] = s.favourites;
  j["listed"] = s.listed;
  j["verified"] = s.verified;
  j["default_profile"] = s.default_profile;
  j["default_profile_image"] = s.default_profile_image;
  j["name"] = s.name;
  j["screen_name"] = s.screen_name;
  j["description"] = s.description;
  return j.dump();
}

std::string to_csv_row(const AccountLabel& l) {
  std::string row = io::csv_escape(l.user_id);
  row += ',';
  row += to_string(l.status);
  row += ',';
  if (l.status_date) row += format_iso8601(*l.status_date);
  return row;
}

void ParseStats::note_skip(std::size_t line_no, const std::string& why) {
  ++skipped;
  if (warnings.size() < 20) {
    warnings.push_back("line " + std::to_string(line_no) + ": " + why);
  }
}

namespace {

template <typename Fn>
ParseStats ingest_lines(const std::filesystem::path& path, bool skip_header,
                        Fn&& fn) {
  ParseStats stats;
  std::size_t line_no = 0;
  io::for_each_line(path, [&](std::string_view line) {
    ++line_no;
    if (line.empty()) return;
    if (skip_header && line_no == 1 && line.rfind("user_id", 0) == 0) return;
    try {
      if (fn(line)) {
        ++stats.parsed;
      } else {
        ++stats.parsed;
        ++stats.duplicates;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMalformedRecord) throw;
      stats.note_skip(line_no, e.what());
    }
  });
  return stats;
}

}  // namespace

bool CorpusBuilder::add_tweet(Tweet t) {
  if (!tweet_ids_.insert(t.tweet_id).second) return false;
  tweets_.push_back(std::move(t));
  return true;
}

bool CorpusBuilder::add_snapshot(UserSnapshot s) {
  std::string key = s.user_id + '\x1f' + std::to_string(s.observed_at);
  if (!snapshot_keys_.insert(std::move(key)).second) return false;
  snapshots_.push_back(std::move(s));
  return true;
}

void CorpusBuilder::add_label(AccountLabel l) {
  std::string id = l.user_id;
  labels_.insert_or_assign(std::move(id), std::move(l));
}

ParseStats CorpusBuilder::ingest_tweets_file(const std::filesystem::path& path) {
  return ingest_lines(path, false, [&](std::string_view line) {
    return add_tweet(parse_tweet_record(line));
  });
}

ParseStats CorpusBuilder::ingest_snapshots_file(
    const std::filesystem::path& path) {
  return ingest_lines(path, false, [&](std::string_view line) {
    return add_snapshot(parse_snapshot_record(line));
  });
}

ParseStats CorpusBuilder::ingest_labels_file(const std::filesystem::path& path) {
  return ingest_lines(path, true, [&](std::string_view line) {
    add_label(parse_label_row(line));
    return true;
  });
}

Corpus CorpusBuilder::build() && {
  Corpus c;
  for (auto& t : tweets_) {
    std::string uid = t.user_id;
    c.users_[uid].tweets.push_back(std::move(t));
  }
  for (auto& s : snapshots_) {
    std::string uid = s.user_id;
    c.users_[uid].snapshots.push_back(std::move(s));
  }
  for (auto& [uid, data] : c.users_) {
    std::sort(data.tweets.begin(), data.tweets.end(),
              [](const Tweet& a, const Tweet& b) {
                if (a.created_at != b.created_at) {
                  return a.created_at < b.created_at;
                }
                return a.tweet_id < b.tweet_id;
              });
    std::sort(data.snapshots.begin(), data.snapshots.end(),
              [](const UserSnapshot& a, const UserSnapshot& b) {
                return a.observed_at < b.observed_at;
              });
    for (std::size_t i = 0; i < data.tweets.size(); ++i) {
      c.tweet_index_.emplace(data.tweets[i].tweet_id, std::make_pair(uid, i));
    }
    c.tweet_count_ += data.tweets.size();
    c.snapshot_count_ += data.snapshots.size();
  }
  c.labels_ = std::move(labels_);
  tweets_.clear();
  snapshots_.clear();
  tweet_ids_.clear();
  snapshot_keys_.clear();
  return c;
}

std::span<const Tweet> Corpus::user_timeline(std::string_view user_id,
                                             TimeWindow window) const {
  auto it = users_.find(user_id);
  if (it == users_.end()) return {};
  const auto& tw = it->second.tweets;
  auto lo = std::lower_bound(
      tw.begin(), tw.end(), window.start,
      [](const Tweet& t, Epoch v) { return t.created_at < v; });
  auto hi = std::lower_bound(
      lo, tw.end(), window.end,
      [](const Tweet& t, Epoch v) { return t.created_at < v; });
  return {lo, hi};
}

std::span<const Tweet> Corpus::user_timeline(std::string_view user_id) const {
  auto it = users_.find(user_id);
  if (it == users_.end()) return {};
  return it->second.tweets;
}

std::span<const UserSnapshot> Corpus::snapshots(std::string_view user_id,
                                                TimeWindow window) const {
  auto it = users_.find(user_id);
  if (it == users_.end()) return {};
  const auto& ss = it->second.snapshots;
  auto lo = std::lower_bound(
      ss.begin(), ss.end(), window.start,
      [](const UserSnapshot& s, Epoch v) { return s.observed_at < v; });
  auto hi = std::lower_bound(
      lo, ss.end(), window.end,
      [](const UserSnapshot& s, Epoch v) { return s.observed_at < v; });
  return {lo, hi};
}

const AccountLabel* Corpus::label(std::string_view user_id) const {
  auto it = labels_.find(user_id);
  return it == labels_.end() ? nullptr : &it->second;
}

std::vector<std::string> Corpus::user_ids() const {
  std::vector<std::string> out;
  out.reserve(users_.size());
  for (const auto& [uid, _] : users_) out.push_back(uid);
  return out;
}

bool Corpus::active_in(std::string_view user_id, TimeWindow window) const {
  return !user_timeline(user_id, window).empty();
}

std::vector<std::string> Corpus::active_users(TimeWindow window) const {
  std::vector<std::string> out;
  for (const auto& [uid, _] : users_) {
    if (active_in(uid, window)) out.push_back(uid);
  }
  return out;
}

const Tweet* Corpus::find_tweet(std::string_view tweet_id) const {
  auto it = tweet_index_.find(tweet_id);
  if (it == tweet_index_.end()) return nullptr;
  const auto& [uid, pos] = it->second;
  return &users_.find(uid)->second.tweets[pos];
}

// ---------------------------------------------------------------------------
// CorpusStore

struct CorpusStore::Impl {
  sqlite3* db = nullptr;

  void exec(const char* sql) const {
    char* err = nullptr;
    if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
      std::string msg = err ? err : "sqlite error";
      sqlite3_free(err);
      fail(ErrorCode::kIoError, msg);
    }
  }

  sqlite3_stmt* prepare(const char* sql) const {
    sqlite3_stmt* stmt = nullptr;
    if (sqlite3_prepare_v2(db, sql, -1, &stmt, nullptr) != SQLITE_OK) {
      fail(ErrorCode::kIoError, sqlite3_errmsg(db));
    }
    return stmt;
  }
};

namespace {

struct Statement {
  sqlite3_stmt* stmt;
  ~Statement() { sqlite3_finalize(stmt); }

  void bind_text(int idx, const std::string& v) {
    sqlite3_bind_text(stmt, idx, v.data(), static_cast<int>(v.size()),
                      SQLITE_TRANSIENT);
  }
  void bind_int(int idx, std::int64_t v) { sqlite3_bind_int64(stmt, idx, v); }
  void bind_null(int idx) { sqlite3_bind_null(stmt, idx); }

  // Returns true when the statement changed a row.
  bool run(sqlite3* db) {
    const int rc = sqlite3_step(stmt);
    if (rc != SQLITE_DONE) fail(ErrorCode::kIoError, sqlite3_errmsg(db));
    sqlite3_reset(stmt);
    sqlite3_clear_bindings(stmt);
    return sqlite3_changes(db) > 0;
  }
};

}  // namespace

CorpusStore::CorpusStore(const std::filesystem::path& path)
    : impl_(std::make_unique<Impl>()) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  if (sqlite3_open(path.string().c_str(), &impl_->db) != SQLITE_OK) {
    std::string msg = sqlite3_errmsg(impl_->db);
    sqlite3_close(impl_->db);
    impl_->db = nullptr;
    fail(ErrorCode::kIoError, "cannot open store: " + msg);
  }
  impl_->exec(
      "PRAGMA journal_mode=OFF;"
      "PRAGMA synchronous=OFF;"
      "CREATE TABLE IF NOT EXISTS tweets("
      " id TEXT PRIMARY KEY, user_id TEXT NOT NULL,"
      " created_at INTEGER NOT NULL, record TEXT NOT NULL);"
      "CREATE INDEX IF NOT EXISTS tweets_by_user"
      " ON tweets(user_id, created_at);"
      "CREATE TABLE IF NOT EXISTS snapshots("
      " user_id TEXT NOT NULL, observed_at INTEGER NOT NULL,"
      " record TEXT NOT NULL, PRIMARY KEY(user_id, observed_at));"
      "CREATE TABLE IF NOT EXISTS labels("
      " user_id TEXT PRIMARY KEY, status TEXT NOT NULL,"
      " status_date INTEGER);");
}

CorpusStore::~CorpusStore() {
  if (impl_ && impl_->db) sqlite3_close(impl_->db);
}

ParseStats CorpusStore::ingest_tweets_file(const std::filesystem::path& path) {
  impl_->exec("BEGIN");
  Statement st{impl_->prepare(
      "INSERT OR IGNORE INTO tweets(id, user_id, created_at, record)"
      " VALUES(?,?,?,?)")};
  ParseStats stats = ingest_lines(path, false, [&](std::string_view line) {
    const Tweet t = parse_tweet_record(line);
    st.bind_text(1, t.tweet_id);
    st.bind_text(2, t.user_id);
    st.bind_int(3, t.created_at);
    st.bind_text(4, to_json_line(t));
    return st.run(impl_->db);
  });
  impl_->exec("COMMIT");
  return stats;
}

ParseStats CorpusStore::ingest_snapshots_file(
    const std::filesystem::path& path) {
  impl_->exec("BEGIN");
  Statement st{impl_->prepare(
      "INSERT OR IGNORE INTO snapshots(user_id, observed_at, record)"
      " VALUES(?,?,?)")};
  ParseStats stats = ingest_lines(path, false, [&](std::string_view line) {
    const UserSnapshot s = parse_snapshot_record(line);
    st.bind_text(1, s.user_id);
    st.bind_int(2, s.observed_at);
    st.bind_text(3, to_json_line(s));
    return st.run(impl_->db);
  });
  impl_->exec("COMMIT");
  return stats;
}

ParseStats CorpusStore::ingest_labels_file(const std::filesystem::path& path) {
  impl_->exec("BEGIN");
  Statement st{impl_->prepare(
      "INSERT OR REPLACE INTO labels(user_id, status, status_date)"
      " VALUES(?,?,?)")};
  ParseStats stats = ingest_lines(path, true, [&](std::string_view line) {
    const AccountLabel l = parse_label_row(line);
    st.bind_text(1, l.user_id);
    st.bind_text(2, std::string(to_string(l.status)));
    if (l.status_date) {
      st.bind_int(3, *l.status_date);
    } else {
      st.bind_null(3);
    }
    st.run(impl_->db);
    return true;
  });
  impl_->exec("COMMIT");
  return stats;
}

std::size_t CorpusStore::tweet_count() const {
  Statement st{impl_->prepare("SELECT COUNT(*) FROM tweets")};
  std::size_t n = 0;
  if (sqlite3_step(st.stmt) == SQLITE_ROW) {
    n = static_cast<std::size_t>(sqlite3_column_int64(st.stmt, 0));
  }
  return n;
}

Corpus CorpusStore::load() const {
  auto column_text = [](sqlite3_stmt* s, int col) {
    const auto* p = sqlite3_column_text(s, col);
    const int n = sqlite3_column_bytes(s, col);
    return std::string_view(reinterpret_cast<const char*>(p),
                            static_cast<std::size_t>(n));
  };
  CorpusBuilder b;
  {
    Statement st{impl_->prepare("SELECT record FROM tweets ORDER BY id")};
    while (sqlite3_step(st.stmt) == SQLITE_ROW) {
      b.add_tweet(parse_tweet_record(column_text(st.stmt, 0)));
    }
  }
  {
    Statement st{impl_->prepare(
        "SELECT record FROM snapshots ORDER BY user_id, observed_at")};
    while (sqlite3_step(st.stmt) == SQLITE_ROW) {
      b.add_snapshot(parse_snapshot_record(column_text(st.stmt, 0)));
    }
  }
  {
    Statement st{impl_->prepare(
        "SELECT user_id, status, status_date FROM labels ORDER BY user_id")};
    while (sqlite3_step(st.stmt) == SQLITE_ROW) {
      std::string row(column_text(st.stmt, 0));
      row += ',';
      row += column_text(st.stmt, 1);
      row += ',';
      if (sqlite3_column_type(st.stmt, 2) != SQLITE_NULL) {
        row += std::to_string(sqlite3_column_int64(st.stmt, 2));
      }
      b.add_label(parse_label_row(row));
    }
  }
  return std::move(b).build();
}

// ---------------------------------------------------------------------------

LabeledUsers select_window_users(const Corpus& corpus, TimeWindow window) {
  LabeledUsers out;
  for (const auto& [uid, l] : corpus.labels()) {
    if (l.status == AccountStatus::kSuspended && l.status_date &&
        window.contains(*l.status_date)) {
      out.push_back({uid, 1});
    }
  }
  for (const std::string& uid : corpus.active_users(window)) {
    const AccountLabel* l = corpus.label(uid);
    if (l == nullptr || l->status == AccountStatus::kNormal) {
      out.push_back({uid, 0});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const LabeledUser& a, const LabeledUser& b) {
              return a.user_id < b.user_id;
            });
  return out;
}

LabeledUsers undersample_balance(std::span<const LabeledUser> users,
                                 std::uint64_t seed) {
  std::vector<LabeledUser> pos;
  std::vector<LabeledUser> neg;
  for (const auto& u : users) (u.label == 1 ? pos : neg).push_back(u);
  if (pos.empty() || neg.empty()) {
    fail(ErrorCode::kEmptyClass, "undersample_balance needs both classes");
  }
  auto by_id = [](const LabeledUser& a, const LabeledUser& b) {
    return a.user_id < b.user_id;
  };
  std::sort(pos.begin(), pos.end(), by_id);
  std::sort(neg.begin(), neg.end(), by_id);
  auto& major = pos.size() > neg.size() ? pos : neg;
  auto& minor = pos.size() > neg.size() ? neg : pos;
  Rng rng(seed);
  LabeledUsers out = minor;
  for (std::size_t idx :
       rng.sample_without_replacement(major.size(), minor.size())) {
    out.push_back(major[idx]);
  }
  std::sort(out.begin(), out.end(), by_id);
  return out;
}

}  // namespace susp::corpus

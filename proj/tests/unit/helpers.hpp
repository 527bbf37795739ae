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

#ifndef SUSP_TESTS_HELPERS_HPP_
#define SUSP_TESTS_HELPERS_HPP_

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include <gtest/gtest.h>

#include "susp/common.hpp"
#include "susp/corpus.hpp"

namespace testutil {

// 2022-02-23T00:00:00Z, a Wednesday.
inline constexpr susp::Epoch kT0 = 1645574400;

inline susp::corpus::Tweet tweet(std::string id, std::string user, susp::Epoch t,
                                 susp::corpus::TweetKind kind = susp::corpus::TweetKind::kOriginal,
                                 std::string text = "hello world",
                                 susp::Epoch reaction = 60, std::string ref_user = "ref") {
  susp::corpus::Tweet tw;
  tw.tweet_id = std::move(id);
  tw.user_id = std::move(user);
  tw.created_at = t;
  tw.kind = kind;
  tw.text = std::move(text);
  if (kind != susp::corpus::TweetKind::kOriginal) {
    tw.referenced_tweet_id = "ref_" + tw.tweet_id;
    tw.referenced_user_id = std::move(ref_user);
    tw.referenced_created_at = t - reaction;
  }
  return tw;
}

inline susp::corpus::UserSnapshot snapshot(std::string user, susp::Epoch observed,
                                           susp::Epoch created, std::int64_t statuses = 10) {
  susp::corpus::UserSnapshot s;
  s.user_id = std::move(user);
  s.observed_at = observed;
  s.account_created_at = created;
  s.statuses = statuses;
  s.followers = 5;
  s.friends = 7;
  s.favourites = 3;
  s.listed = 1;
  s.name = "Some Name";
  s.screen_name = "somename";
  return s;
}

inline susp::corpus::AccountLabel label(std::string user, susp::corpus::AccountStatus s,
                                        std::optional<susp::Epoch> date = std::nullopt) {
  susp::corpus::AccountLabel l;
  l.user_id = std::move(user);
  l.status = s;
  l.status_date = date;
  return l;
}

template <typename F>
susp::ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const susp::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no susp::Error thrown";
  return susp::ErrorCode::kIoError;
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("susp_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil

#endif  // SUSP_TESTS_HELPERS_HPP_

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

#include "susp/profile_features.hpp"

#include <algorithm>
#include <array>

#include "susp/parallel.hpp"
#include "susp/text.hpp"

namespace susp::profile {

double by_age(double action_count, double account_age_days) {
  return action_count / std::max(account_age_days, 1.0);
}

Growth growth(double a_start, double a_end) {
  if (a_start == 0.0) return {1.0, true};
  return {(a_start + a_end) / a_start, false};
}

double name_similarity(std::string_view name, std::string_view screen_name) {
  const std::u32string a = text::fold_case(text::decode_utf8(name));
  const std::u32string b = text::fold_case(text::decode_utf8(screen_name));
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  const double d = static_cast<double>(text::edit_distance(a, b));
  return 1.0 - d / static_cast<double>(longest);
}

namespace {

constexpr std::array<const char*, 5> kCounters = {
    "followers", "friends", "statuses", "favourites", "listed"};

std::array<double, 5> counters(const corpus::UserSnapshot& s) {
  return {static_cast<double>(s.followers), static_cast<double>(s.friends),
          static_cast<double>(s.statuses), static_cast<double>(s.favourites),
          static_cast<double>(s.listed)};
}

double count_digits(std::string_view s) {
  return static_cast<double>(
      std::count_if(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }));
}

std::vector<std::string> make_names() {
  std::vector<std::string> n;
  n.emplace_back("account_age_days");
  for (const char* c : kCounters) n.emplace_back(c);
  for (const char* c : kCounters) n.push_back(std::string(c) + "_by_age");
  for (const char* c : kCounters) n.push_back(std::string(c) + "_growth");
  for (const char* c : kCounters) n.push_back(std::string(c) + "_growth_degenerate");
  for (const char* c : kCounters) n.push_back(std::string(c) + "_delta");
  for (const char* s : {"single_snapshot", "snapshot_count", "monitoring_span_days",
                        "name_screen_name_similarity", "name_length",
                        "screen_name_length", "description_length",
                        "name_digit_count", "screen_name_digit_count",
                        "description_url_count", "description_hashtag_count",
                        "description_mention_count", "has_default_profile",
                        "has_default_profile_image", "verified",
                        "followers_friends_ratio", "favourites_statuses_ratio"}) {
    n.emplace_back(s);
  }
  return n;
}

}  // namespace

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = make_names();
  return names;
}

ProfileFeatures extract_profile_features(const corpus::Corpus& corpus,
                                         std::string_view user_id,
                                         corpus::TimeWindow window) {
  const auto snaps = corpus.snapshots(user_id, window);
  if (snaps.empty()) {
    fail(ErrorCode::kNoSnapshot,
         "no snapshot in window for user " + std::string(user_id));
  }
  const corpus::UserSnapshot& first = snaps.front();
  const corpus::UserSnapshot& last = snaps.back();
  const double age_days = std::max(
      static_cast<double>(window.end - last.account_created_at) /
          static_cast<double>(kSecondsPerDay),
      1.0);
  const auto start = counters(first);
  const auto end = counters(last);

  std::vector<double> v;
  v.reserve(feature_names().size());
  v.push_back(age_days);
  for (double c : end) v.push_back(c);
  for (double c : end) v.push_back(by_age(c, age_days));
  std::array<Growth, 5> g;
  for (std::size_t i = 0; i < 5; ++i) g[i] = growth(start[i], end[i]);
  for (const auto& gi : g) v.push_back(gi.value);
  for (const auto& gi : g) v.push_back(gi.degenerate ? 1.0 : 0.0);
  for (std::size_t i = 0; i < 5; ++i) v.push_back(end[i] - start[i]);

  std::size_t url_count = 0;
  std::size_t hashtag_count = 0;
  std::size_t mention_count = 0;
  for (std::string_view tok : text::split_whitespace(last.description)) {
    if (text::is_url_token(tok)) ++url_count;
    if (tok.size() > 1 && tok[0] == '#') ++hashtag_count;
    if (text::is_mention_token(tok)) ++mention_count;
  }

  v.push_back(snaps.size() == 1 ? 1.0 : 0.0);
  v.push_back(static_cast<double>(snaps.size()));
  v.push_back(static_cast<double>(last.observed_at - first.observed_at) /
              static_cast<double>(kSecondsPerDay));
  v.push_back(name_similarity(last.name, last.screen_name));
  v.push_back(static_cast<double>(text::codepoint_length(last.name)));
  v.push_back(static_cast<double>(text::codepoint_length(last.screen_name)));
  v.push_back(static_cast<double>(text::codepoint_length(last.description)));
  v.push_back(count_digits(last.name));
  v.push_back(count_digits(last.screen_name));
  v.push_back(static_cast<double>(url_count));
  v.push_back(static_cast<double>(hashtag_count));
  v.push_back(static_cast<double>(mention_count));
  v.push_back(last.default_profile ? 1.0 : 0.0);
  v.push_back(last.default_profile_image ? 1.0 : 0.0);
  v.push_back(last.verified ? 1.0 : 0.0);
  v.push_back(end[0] / std::max(end[1], 1.0));
  v.push_back(end[3] / std::max(end[2], 1.0));
  return ProfileFeatures(&feature_names(), std::move(v));
}

model::FeatureMatrix extract_family(const corpus::Corpus& corpus,
                                    std::span<const std::string> users,
                                    corpus::TimeWindow window, int threads) {
  std::vector<std::vector<double>> rows(users.size());
  parallel_for(users.size(), threads, [&](std::size_t i) {
    rows[i] = extract_profile_features(corpus, users[i], window).values();
  });
  auto m = model::make_block(model::Family::kProfile, feature_names());
  for (std::size_t i = 0; i < users.size(); ++i) m.add_row(users[i], rows[i]);
  return m;
}

}  // namespace susp::profile

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

#include "susp/activity_features.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "susp/parallel.hpp"

namespace susp::activity {

using corpus::TweetKind;

namespace {

Epoch floor_div(Epoch a, Epoch b) {
  Epoch q = a / b;
  if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

constexpr std::array<const char*, 7> kWeekdays = {"mon", "tue", "wed", "thu",
                                                  "fri", "sat", "sun"};

template <std::size_t N, typename Bucket>
std::array<double, N> distribution(Timeline timeline, Bucket bucket) {
  std::array<double, N> out{};
  if (timeline.empty()) return out;
  for (const auto& t : timeline) out[static_cast<std::size_t>(bucket(t))] += 1.0;
  const double n = static_cast<double>(timeline.size());
  for (auto& v : out) v /= n;
  return out;
}

template <std::size_t N, typename Bucket>
std::array<double, N> kind_distribution(Timeline timeline, TweetKind kind,
                                        Bucket bucket) {
  std::array<double, N> out{};
  double n = 0.0;
  for (const auto& t : timeline) {
    if (t.kind != kind) continue;
    out[static_cast<std::size_t>(bucket(t))] += 1.0;
    n += 1.0;
  }
  if (n > 0.0) {
    for (auto& v : out) v /= n;
  }
  return out;
}

template <std::size_t N>
double argmax_or_missing(const std::array<double, N>& a) {
  double best = 0.0;
  double idx = kMissing;
  for (std::size_t i = 0; i < N; ++i) {
    if (a[i] > best) {
      best = a[i];
      idx = static_cast<double>(i);
    }
  }
  return idx;
}

std::vector<std::string> make_names() {
  std::vector<std::string> n;
  char buf[64];
  for (int h = 0; h < 24; ++h) {
    std::snprintf(buf, sizeof buf, "hour_frac_%02d", h);
    n.emplace_back(buf);
  }
  for (const char* d : kWeekdays) n.push_back(std::string("weekday_frac_") + d);
  for (TweetKind k : corpus::kAllKinds) {
    const std::string kl(corpus::kind_label(k));
    for (int h = 0; h < 24; ++h) {
      std::snprintf(buf, sizeof buf, "_hour_frac_%02d", h);
      n.push_back(kl + buf);
    }
    for (const char* d : kWeekdays) n.push_back(kl + "_weekday_frac_" + d);
  }
  n.emplace_back("peak_hour");
  n.emplace_back("peak_weekday");
  append_stat_names("retweet_reaction", n);
  append_stat_names("quote_reaction", n);
  for (const char* s : {"tweet_fraction", "retweet_fraction", "quote_fraction",
                        "actions_total", "actions_per_day", "active_days",
                        "active_hours", "activity_time_range"}) {
    n.emplace_back(s);
  }
  append_stat_names("inter_arrival", n);
  return n;
}

}  // namespace

int hour_of_day(Epoch t) {
  return static_cast<int>(floor_div(t, 3600) % 24 + 24) % 24;
}

int day_of_week(Epoch t) {
  // 1970-01-01 was a Thursday (index 3).
  const Epoch days = floor_div(t, kSecondsPerDay);
  return static_cast<int>(((days + 3) % 7 + 7) % 7);
}

std::array<double, 24> hourly_distribution(Timeline timeline) {
  return distribution<24>(timeline, [](const corpus::Tweet& t) {
    return hour_of_day(t.created_at);
  });
}

std::array<double, 7> weekday_distribution(Timeline timeline) {
  return distribution<7>(timeline, [](const corpus::Tweet& t) {
    return day_of_week(t.created_at);
  });
}

ReactionStats reaction_time_stats(Timeline timeline) {
  std::vector<double> rt;
  std::vector<double> qt;
  ReactionStats out;
  for (const auto& t : timeline) {
    if (t.kind == TweetKind::kOriginal || !t.referenced_created_at) continue;
    const Epoch delta = t.created_at - *t.referenced_created_at;
    if (delta < 0) {
      ++out.negative_skipped;
      continue;
    }
    (t.kind == TweetKind::kRetweet ? rt : qt).push_back(static_cast<double>(delta));
  }
  out.retweet = summarize(rt);
  out.quote = summarize(qt);
  return out;
}

std::array<double, 3> action_mix(Timeline timeline) {
  std::array<double, 3> out{};
  if (timeline.empty()) return out;
  for (const auto& t : timeline) out[static_cast<std::size_t>(t.kind)] += 1.0;
  const double n = static_cast<double>(timeline.size());
  for (auto& v : out) v /= n;
  return out;
}

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = make_names();
  return names;
}

ActivityFeatures activity_features_from(Timeline timeline,
                                        corpus::TimeWindow window) {
  std::vector<double> v;
  v.reserve(feature_names().size());
  const auto hours = hourly_distribution(timeline);
  const auto days = weekday_distribution(timeline);
  v.insert(v.end(), hours.begin(), hours.end());
  v.insert(v.end(), days.begin(), days.end());
  auto hour_of = [](const corpus::Tweet& t) { return hour_of_day(t.created_at); };
  auto day_of = [](const corpus::Tweet& t) { return day_of_week(t.created_at); };
  for (TweetKind k : corpus::kAllKinds) {
    const auto kh = kind_distribution<24>(timeline, k, hour_of);
    const auto kd = kind_distribution<7>(timeline, k, day_of);
    v.insert(v.end(), kh.begin(), kh.end());
    v.insert(v.end(), kd.begin(), kd.end());
  }
  v.push_back(argmax_or_missing(hours));
  v.push_back(argmax_or_missing(days));
  const ReactionStats rs = reaction_time_stats(timeline);
  append_stat_values(rs.retweet, v);
  append_stat_values(rs.quote, v);
  const auto mix = action_mix(timeline);
  v.insert(v.end(), mix.begin(), mix.end());

  const double n = static_cast<double>(timeline.size());
  v.push_back(n);
  v.push_back(n / std::max(window.days(), 1.0));
  std::set<Epoch> day_slots;
  std::set<Epoch> hour_slots;
  for (const auto& t : timeline) {
    day_slots.insert(floor_div(t.created_at, kSecondsPerDay));
    hour_slots.insert(floor_div(t.created_at, 3600));
  }
  v.push_back(static_cast<double>(day_slots.size()));
  v.push_back(static_cast<double>(hour_slots.size()));
  if (timeline.empty()) {
    v.push_back(kMissing);
  } else {
    v.push_back(static_cast<double>(timeline.back().created_at -
                                    timeline.front().created_at));
  }
  std::vector<double> gaps;
  for (std::size_t i = 1; i < timeline.size(); ++i) {
    gaps.push_back(static_cast<double>(timeline[i].created_at -
                                       timeline[i - 1].created_at));
  }
  append_stat_values(summarize(gaps), v);
  return ActivityFeatures(&feature_names(), std::move(v));
}

ActivityFeatures extract_activity_features(const corpus::Corpus& corpus,
                                           std::string_view user_id,
                                           corpus::TimeWindow window) {
  return activity_features_from(corpus.user_timeline(user_id, window), window);
}

model::FeatureMatrix extract_family(const corpus::Corpus& corpus,
                                    std::span<const std::string> users,
                                    corpus::TimeWindow window, int threads) {
  std::vector<std::vector<double>> rows(users.size());
  parallel_for(users.size(), threads, [&](std::size_t i) {
    rows[i] = extract_activity_features(corpus, users[i], window).values();
  });
  auto m = model::make_block(model::Family::kActivity, feature_names());
  for (std::size_t i = 0; i < users.size(); ++i) m.add_row(users[i], rows[i]);
  return m;
}

}  // namespace susp::activity

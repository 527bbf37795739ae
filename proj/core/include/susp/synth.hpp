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

#ifndef SUSP_SYNTH_HPP_
#define SUSP_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "susp/corpus.hpp"

namespace susp::synth {

// Per-class behaviour. Counts on snapshots grow linearly with account age at
// a per-user rate drawn log-normally around the class mean.
struct ClassBehavior {
  double account_age_mean_days = 1500.0;  // exponential
  double account_age_min_days = 30.0;
  double statuses_per_day = 4.0;          // lifetime posting rate
  double followers_per_day = 0.3;
  double friends_per_day = 0.3;
  double favourites_per_day = 3.0;
  double listed_per_day = 0.01;
  double rate_sigma = 0.6;                // log-normal spread of per-user rates
  double observed_posts_per_day = 1.2;    // Poisson rate of collected posts
  double retweet_prob = 0.45;
  double quote_prob = 0.1;
  double reaction_log_mean = 8.5;         // log seconds
  double reaction_log_sigma = 1.2;
  double duplicate_prob = 0.0;            // originals/quotes copying a campaign text
  double diurnal = 1.0;                   // 0 = uniform hours, 1 = strong day cycle
  double default_image_prob = 0.05;
  double digit_name_prob = 0.15;
  double verified_prob = 0.02;
  double hashtag_rate = 0.8;              // mean hashtags per original
  double url_prob = 0.15;
  double mention_rate = 0.3;
  // Share of users who post, react and link like the normal class while
  // keeping this class's profile.
  double mimic_prob = 0.0;
};

struct GeneratorConfig {
  // Per window cohort.
  std::size_t normal_users = 200;
  std::size_t suspended_users = 200;
  // Extra normal-looking users labeled deactivated, as a share of normal_users.
  double deactivated_fraction = 0.02;
  int windows = 2;
  Epoch start = 1645574400;  // 2022-02-23T00:00:00Z
  int window_days = 21;
  int snapshots_per_window = 3;
  ClassBehavior normal;
  ClassBehavior suspended = default_suspended();
  std::size_t vocabulary = 4000;
  std::size_t hashtag_pool = 300;
  std::size_t trending_hashtags = 15;
  std::size_t campaign_pool = 40;
  // Window-2 suspended users write like normal users: no campaign copies,
  // ordinary vocabulary and hashtags. Profiles and timing are unchanged.
  bool drift = false;

  static ClassBehavior default_suspended();
  // Throws kInvalidArgument for negative rates or probabilities outside [0, 1].
  void validate() const;
};

struct GeneratedCorpus {
  std::vector<corpus::Tweet> tweets;
  std::vector<corpus::UserSnapshot> snapshots;
  std::vector<corpus::AccountLabel> labels;
};

GeneratedCorpus generate(const GeneratorConfig& config, std::uint64_t seed);

struct CorpusPaths {
  std::filesystem::path tweets;
  std::filesystem::path snapshots;
  std::filesystem::path labels;
};

CorpusPaths default_paths(const std::filesystem::path& dir);

// tweets.jsonl, snapshots.jsonl and labels.csv in the corpus formats.
void write_corpus(const GeneratedCorpus& c, const CorpusPaths& paths);

}  // namespace susp::synth

#endif  // SUSP_SYNTH_HPP_

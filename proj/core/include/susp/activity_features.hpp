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

#ifndef SUSP_ACTIVITY_FEATURES_HPP_
#define SUSP_ACTIVITY_FEATURES_HPP_

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "susp/common.hpp"
#include "susp/corpus.hpp"
#include "susp/feature_matrix.hpp"

namespace susp::activity {

using ActivityFeatures = model::FeatureRow;
using Timeline = std::span<const corpus::Tweet>;

// UTC hour of day, 0-23.
int hour_of_day(Epoch t);
// ISO weekday index, Monday = 0 ... Sunday = 6.
int day_of_week(Epoch t);

// Fraction of actions per UTC hour; all zero for an empty timeline.
std::array<double, 24> hourly_distribution(Timeline timeline);
std::array<double, 7> weekday_distribution(Timeline timeline);

struct ReactionStats {
  SummaryStats retweet;
  SummaryStats quote;
  std::size_t negative_skipped = 0;
};

// Seconds between the referenced post and the user's retweet/quote.
// Negative deltas (clock skew) are skipped and counted.
ReactionStats reaction_time_stats(Timeline timeline);

// (tweet, retweet, quote) fractions; zeros for an empty timeline.
std::array<double, 3> action_mix(Timeline timeline);

const std::vector<std::string>& feature_names();

ActivityFeatures extract_activity_features(const corpus::Corpus& corpus,
                                           std::string_view user_id,
                                           corpus::TimeWindow window);
ActivityFeatures activity_features_from(Timeline timeline,
                                        corpus::TimeWindow window);

model::FeatureMatrix extract_family(const corpus::Corpus& corpus,
                                    std::span<const std::string> users,
                                    corpus::TimeWindow window, int threads = 1);

}  // namespace susp::activity

#endif  // SUSP_ACTIVITY_FEATURES_HPP_

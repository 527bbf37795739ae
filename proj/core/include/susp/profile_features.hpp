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

#ifndef SUSP_PROFILE_FEATURES_HPP_
#define SUSP_PROFILE_FEATURES_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "susp/corpus.hpp"
#include "susp/feature_matrix.hpp"

namespace susp::profile {

using ProfileFeatures = model::FeatureRow;

// action_count / max(account_age_days, 1).
double by_age(double action_count, double account_age_days);

struct Growth {
  double value = 1.0;
  bool degenerate = false;  // a_start was zero
};

// (a_start + a_end) / a_start. A zero start yields 1.0 with degenerate set.
Growth growth(double a_start, double a_end);

// 1 - edit_distance / max_length over case-folded code points; 1 when both
// strings are empty.
double name_similarity(std::string_view name, std::string_view screen_name);

const std::vector<std::string>& feature_names();

// Features from the user's in-window snapshots: growth from the earliest and
// latest, raw counts and rates from the latest with age measured at the
// window end. Throws Error{kNoSnapshot}.
ProfileFeatures extract_profile_features(const corpus::Corpus& corpus,
                                         std::string_view user_id,
                                         corpus::TimeWindow window);

// Users without a snapshot must be filtered out beforehand.
model::FeatureMatrix extract_family(const corpus::Corpus& corpus,
                                    std::span<const std::string> users,
                                    corpus::TimeWindow window, int threads = 1);

}  // namespace susp::profile

#endif  // SUSP_PROFILE_FEATURES_HPP_

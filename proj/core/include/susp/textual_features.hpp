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

#ifndef SUSP_TEXTUAL_FEATURES_HPP_
#define SUSP_TEXTUAL_FEATURES_HPP_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "susp/common.hpp"
#include "susp/corpus.hpp"
#include "susp/feature_matrix.hpp"

namespace susp::textual {

using TextualFeatures = model::FeatureRow;
using Timeline = std::span<const corpus::Tweet>;

enum class Entity : std::uint8_t { kHashtags, kUrls, kMentions };

std::string_view entity_label(Entity e);

// Per-post entity counts restricted to one post kind.
SummaryStats entity_stats(Timeline timeline, corpus::TweetKind kind,
                          Entity entity);

// Document frequency over users. Hashtags are case-folded; mentions are user
// ids and compared verbatim.
class IdfTable {
 public:
  IdfTable() = default;
  IdfTable(std::map<std::string, std::size_t, std::less<>> df,
           std::size_t total_users);

  // ln(total_users / max(df, 1)).
  double idf(std::string_view term) const;
  std::size_t df(std::string_view term) const;
  std::size_t total_users() const { return total_users_; }
  const std::map<std::string, std::size_t, std::less<>>& entries() const {
    return df_;
  }

  // CSV "hashtag,df" preceded by a "# total_users=N" line.
  void write_csv(const std::filesystem::path& path) const;
  static IdfTable read_csv(const std::filesystem::path& path);

 private:
  std::map<std::string, std::size_t, std::less<>> df_;
  std::size_t total_users_ = 0;
};

using HashtagIdfTable = IdfTable;

std::string normalize_term(std::string_view term, Entity entity);

IdfTable build_idf(const corpus::Corpus& corpus,
                   std::span<const std::string> users,
                   corpus::TimeWindow window,
                   Entity entity = Entity::kHashtags);

// tf(h, user) * idf(h) for every distinct term the user used, with tf the raw
// usage count; stats over those scores.
SummaryStats tfidf_stats(Timeline timeline, const IdfTable& idf,
                         Entity entity = Entity::kHashtags);
SummaryStats hashtag_tfidf_stats(const corpus::Corpus& corpus,
                                 std::string_view user_id,
                                 corpus::TimeWindow window,
                                 const IdfTable& idf);

// Distinct case-folded tokens of original posts, URLs and mentions removed.
std::size_t vocabulary_size(Timeline timeline);

const std::vector<std::string>& feature_names();

struct IdfTables {
  IdfTable hashtags;
  IdfTable mentions;
};

IdfTables build_idf_tables(const corpus::Corpus& corpus,
                           std::span<const std::string> users,
                           corpus::TimeWindow window);

TextualFeatures extract_textual_features(const corpus::Corpus& corpus,
                                         std::string_view user_id,
                                         corpus::TimeWindow window,
                                         const IdfTables& idf);

model::FeatureMatrix extract_family(const corpus::Corpus& corpus,
                                    std::span<const std::string> users,
                                    corpus::TimeWindow window,
                                    const IdfTables& idf, int threads = 1);

}  // namespace susp::textual

#endif  // SUSP_TEXTUAL_FEATURES_HPP_

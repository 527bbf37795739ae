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

#ifndef SUSP_CLUSTERING_HPP_
#define SUSP_CLUSTERING_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "susp/text_embedding.hpp"

namespace susp::clustering {

struct Cluster {
  std::size_t leader = 0;  // row index of the leader item
  std::size_t size = 0;
  std::vector<double> centroid;  // unit length unless every member is zero
};

struct ClusterAssignment {
  std::vector<std::string> item_ids;
  std::vector<std::size_t> cluster_of;  // per item
  std::vector<Cluster> clusters;        // cluster id = index, in leader order

  std::size_t item_count() const { return item_ids.size(); }
  std::vector<std::size_t> members(std::size_t cluster_id) const;
};

enum class LeaderIndex {
  kNaive,   // scan every leader
  kBucket,  // sign-pattern buckets with an exact similarity bound
};

// Greedy single-pass leader clustering in row order. An item joins the
// leader of highest cosine similarity among those >= tau (earliest leader on
// ties) or else starts a new cluster. Rows are L2-normalized internally.
// Throws kInvalidArgument unless 0 < tau <= 1.
ClusterAssignment cluster_cosine(const embedding::EmbeddingMatrix& x, double tau,
                                 LeaderIndex index = LeaderIndex::kBucket);

struct ClusterReportEntry {
  std::size_t cluster_id = 0;
  std::size_t size = 0;
  std::string leader_id;
  std::string leader_text;
  std::vector<std::string> sample_ids;
  std::vector<std::string> samples;
};

// Clusters by size descending, then cluster id. Samples are the first
// sample_n members in item order. texts is aligned with item_ids.
std::vector<ClusterReportEntry> cluster_report(const ClusterAssignment& a,
                                               std::span<const std::string> texts,
                                               std::size_t sample_n = 10);

void write_report_jsonl(const std::filesystem::path& path,
                        std::span<const ClusterReportEntry> report);
void write_report_digest(const std::filesystem::path& path,
                         std::span<const ClusterReportEntry> report,
                         std::size_t top_n = 50);

struct KeywordHit {
  std::size_t cluster_id = 0;
  std::size_t size = 0;
  std::map<std::string, std::size_t> counts;  // keyword -> occurrences
  std::size_t total = 0;
};

// Case-insensitive substring occurrences per keyword. Only clusters with at
// least one match are returned, by total descending then cluster id.
std::vector<KeywordHit> keyword_search(const ClusterAssignment& a,
                                       std::span<const std::string> texts,
                                       std::span<const std::string> keywords,
                                       int threads = 1);

struct ToxicitySummary {
  std::size_t scored = 0;
  std::size_t toxic = 0;
  std::size_t unknown_ids = 0;
  double fraction = 0.0;
  bool zero_count = true;
};

// Reads CSV tweet_id,score. Scores strictly above threshold count as toxic.
// Rows whose tweet id is not in known_ids are skipped and counted; an empty
// known_ids disables that check.
ToxicitySummary toxicity_summary(const std::filesystem::path& scores_csv,
                                 const std::unordered_set<std::string>& known_ids,
                                 double threshold = 0.5);

}  // namespace susp::clustering

#endif  // SUSP_CLUSTERING_HPP_

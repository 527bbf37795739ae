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

#include "susp/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "susp/common.hpp"
#include "susp/io.hpp"
#include "susp/parallel.hpp"
#include "susp/text.hpp"

namespace susp::clustering {

std::vector<std::size_t> ClusterAssignment::members(std::size_t cluster_id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cluster_of.size(); ++i) {
    if (cluster_of[i] == cluster_id) out.push_back(i);
  }
  return out;
}

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> normalized_rows(const embedding::EmbeddingMatrix& x) {
  std::vector<double> out(x.data());
  const std::size_t d = x.dim();
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double* row = out.data() + r * d;
    const double n = std::sqrt(dot(row, row, d));
    if (n > 0.0) {
      for (std::size_t c = 0; c < d; ++c) row[c] /= n;
    }
  }
  return out;
}

// Leaders grouped by the sign pattern of their first few coordinates. For a
// query q, every leader l in a bucket satisfies
//   q.l <= sum_i max(q_i lo_i, q_i hi_i) + |q_rest| * max |l_rest|
// so whole buckets below tau are skipped.
class BucketIndex {
 public:
  BucketIndex(std::size_t dim) : dim_(dim), bits_(std::min<std::size_t>(dim, 8)) {
    buckets_.resize(std::size_t{1} << bits_);
  }

  void add(std::size_t leader_slot, const double* v) {
    auto& b = buckets_[key(v)];
    if (b.leaders.empty()) {
      b.lo.assign(v, v + bits_);
      b.hi.assign(v, v + bits_);
      active_.push_back(key(v));
    } else {
      for (std::size_t i = 0; i < bits_; ++i) {
        b.lo[i] = std::min(b.lo[i], v[i]);
        b.hi[i] = std::max(b.hi[i], v[i]);
      }
    }
    const double rest = std::sqrt(std::max(0.0, dot(v + bits_, v + bits_, dim_ - bits_)));
    b.rest_norm = std::max(b.rest_norm, rest);
    b.leaders.push_back(leader_slot);
  }

  template <typename Fn>
  void candidates(const double* q, double tau, Fn&& fn) const {
    const double q_rest = std::sqrt(std::max(0.0, dot(q + bits_, q + bits_, dim_ - bits_)));
    for (std::size_t k : active_) {
      const auto& b = buckets_[k];
      double bound = q_rest * b.rest_norm;
      for (std::size_t i = 0; i < bits_; ++i) {
        bound += std::max(q[i] * b.lo[i], q[i] * b.hi[i]);
      }
      if (bound < tau - 1e-9) continue;
      for (std::size_t slot : b.leaders) fn(slot);
    }
  }

 private:
  struct Bucket {
    std::vector<std::size_t> leaders;
    std::vector<double> lo;
    std::vector<double> hi;
    double rest_norm = 0.0;
  };

  std::size_t key(const double* v) const {
    std::size_t k = 0;
    for (std::size_t i = 0; i < bits_; ++i) k |= static_cast<std::size_t>(v[i] < 0.0) << i;
    return k;
  }

  std::size_t dim_;
  std::size_t bits_;
  std::vector<Bucket> buckets_;
  std::vector<std::size_t> active_;
};

}  // namespace

ClusterAssignment cluster_cosine(const embedding::EmbeddingMatrix& x, double tau,
                                 LeaderIndex index) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "tau must lie in (0, 1]");
  }
  const std::size_t n = x.rows();
  const std::size_t d = x.dim();
  const std::vector<double> rows = normalized_rows(x);

  ClusterAssignment a;
  a.item_ids = x.ids();
  a.cluster_of.assign(n, 0);
  std::vector<std::size_t> leader_rows;
  std::vector<std::vector<double>> sums;
  BucketIndex buckets(d);

  for (std::size_t i = 0; i < n; ++i) {
    const double* q = rows.data() + i * d;
    std::size_t best = SIZE_MAX;
    double best_sim = 0.0;
    auto consider = [&](std::size_t slot) {
      const double s = dot(q, rows.data() + leader_rows[slot] * d, d);
      if (s >= tau && (best == SIZE_MAX || s > best_sim || (s == best_sim && slot < best))) {
        best = slot;
        best_sim = s;
      }
    };
    if (index == LeaderIndex::kNaive || d == 0) {
      for (std::size_t slot = 0; slot < leader_rows.size(); ++slot) consider(slot);
    } else {
      buckets.candidates(q, tau, consider);
    }
    if (best == SIZE_MAX) {
      best = leader_rows.size();
      leader_rows.push_back(i);
      sums.emplace_back(d, 0.0);
      if (d > 0) buckets.add(best, q);
    }
    a.cluster_of[i] = best;
    for (std::size_t c = 0; c < d; ++c) sums[best][c] += q[c];
  }

  a.clusters.resize(leader_rows.size());
  for (std::size_t k = 0; k < leader_rows.size(); ++k) {
    a.clusters[k].leader = leader_rows[k];
    auto& centroid = sums[k];
    const double norm = std::sqrt(dot(centroid.data(), centroid.data(), d));
    if (norm > 0.0) {
      for (double& v : centroid) v /= norm;
    }
    a.clusters[k].centroid = std::move(centroid);
  }
  for (std::size_t c : a.cluster_of) ++a.clusters[c].size;
  return a;
}

namespace {

std::vector<std::vector<std::size_t>> member_lists(const ClusterAssignment& a) {
  std::vector<std::vector<std::size_t>> out(a.clusters.size());
  for (std::size_t i = 0; i < a.cluster_of.size(); ++i) out[a.cluster_of[i]].push_back(i);
  return out;
}

void check_texts(const ClusterAssignment& a, std::span<const std::string> texts) {
  if (texts.size() != a.item_count()) {
    fail(ErrorCode::kInvalidArgument, "texts must align with clustered items");
  }
}

}  // namespace

std::vector<ClusterReportEntry> cluster_report(const ClusterAssignment& a,
                                               std::span<const std::string> texts,
                                               std::size_t sample_n) {
  check_texts(a, texts);
  const auto members = member_lists(a);
  std::vector<ClusterReportEntry> out;
  out.reserve(a.clusters.size());
  for (std::size_t k = 0; k < a.clusters.size(); ++k) {
    ClusterReportEntry e;
    e.cluster_id = k;
    e.size = a.clusters[k].size;
    e.leader_id = a.item_ids[a.clusters[k].leader];
    e.leader_text = texts[a.clusters[k].leader];
    for (std::size_t j = 0; j < members[k].size() && j < sample_n; ++j) {
      e.sample_ids.push_back(a.item_ids[members[k][j]]);
      e.samples.push_back(texts[members[k][j]]);
    }
    out.push_back(std::move(e));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
    return l.size != r.size ? l.size > r.size : l.cluster_id < r.cluster_id;
  });
  return out;
}

void write_report_jsonl(const std::filesystem::path& path,
                        std::span<const ClusterReportEntry> report) {
  io::AtomicFile f(path);
  for (const auto& e : report) {
    nlohmann::json j = {{"cluster_id", e.cluster_id}, {"size", e.size},
                        {"leader_id", e.leader_id},   {"leader_text", e.leader_text},
                        {"sample_ids", e.sample_ids}, {"samples", e.samples}};
    f.stream() << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
  f.commit();
}

void write_report_digest(const std::filesystem::path& path,
                         std::span<const ClusterReportEntry> report,
                         std::size_t top_n) {
  std::size_t total = 0;
  for (const auto& e : report) total += e.size;
  io::AtomicFile f(path);
  auto& out = f.stream();
  out << "clusters: " << report.size() << "\nitems: " << total << "\n\n";
  for (std::size_t i = 0; i < report.size() && i < top_n; ++i) {
    const auto& e = report[i];
    out << "#" << e.cluster_id << " size=" << e.size << "\n  leader: " << e.leader_text << '\n';
    for (const auto& s : e.samples) out << "  - " << s << '\n';
    out << '\n';
  }
  f.commit();
}

std::vector<KeywordHit> keyword_search(const ClusterAssignment& a,
                                       std::span<const std::string> texts,
                                       std::span<const std::string> keywords,
                                       int threads) {
  check_texts(a, texts);
  std::vector<std::vector<std::size_t>> per_item(texts.size());
  parallel_for(texts.size(), threads, [&](std::size_t i) {
    per_item[i].resize(keywords.size());
    for (std::size_t k = 0; k < keywords.size(); ++k) {
      per_item[i][k] = text::count_occurrences_icase(texts[i], keywords[k]);
    }
  });
  std::vector<KeywordHit> hits(a.clusters.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    auto& h = hits[a.cluster_of[i]];
    for (std::size_t k = 0; k < keywords.size(); ++k) {
      if (per_item[i][k] == 0) continue;
      h.counts[keywords[k]] += per_item[i][k];
      h.total += per_item[i][k];
    }
  }
  std::vector<KeywordHit> out;
  for (std::size_t c = 0; c < hits.size(); ++c) {
    if (hits[c].total == 0) continue;
    hits[c].cluster_id = c;
    hits[c].size = a.clusters[c].size;
    out.push_back(std::move(hits[c]));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
    return l.total != r.total ? l.total > r.total : l.cluster_id < r.cluster_id;
  });
  return out;
}

ToxicitySummary toxicity_summary(const std::filesystem::path& scores_csv,
                                 const std::unordered_set<std::string>& known_ids,
                                 double threshold) {
  ToxicitySummary s;
  bool header = true;
  io::for_each_line(scores_csv, [&](std::string_view line) {
    if (line.empty()) return;
    auto cells = io::split_csv_line(line);
    if (header) {
      header = false;
      if (!cells.empty() && cells[0] == "tweet_id") return;
    }
    if (cells.size() < 2) fail(ErrorCode::kMalformedRecord, "score row needs 2 columns");
    const double score = io::parse_double_cell(cells[1]);
    if (is_missing(score) || score < 0.0 || score > 1.0) {
      fail(ErrorCode::kMalformedRecord, "score outside [0, 1]: " + cells[1]);
    }
    if (!known_ids.empty() && !known_ids.contains(cells[0])) {
      ++s.unknown_ids;
      return;
    }
    ++s.scored;
    if (score > threshold) ++s.toxic;
  });
  s.zero_count = s.scored == 0;
  s.fraction = s.zero_count ? 0.0 : static_cast<double>(s.toxic) / static_cast<double>(s.scored);
  return s;
}

}  // namespace susp::clustering

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

#include "susp/textual_features.hpp"

#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "susp/io.hpp"
#include "susp/parallel.hpp"
#include "susp/text.hpp"

namespace susp::textual {

using corpus::Tweet;
using corpus::TweetKind;

namespace {

constexpr std::array<Entity, 3> kEntities = {Entity::kHashtags, Entity::kUrls,
                                             Entity::kMentions};

const std::vector<std::string>& entities_of(const Tweet& t, Entity e) {
  switch (e) {
    case Entity::kHashtags: return t.hashtags;
    case Entity::kUrls: return t.urls;
    case Entity::kMentions: return t.mentions;
  }
  return t.hashtags;
}

std::vector<std::string> make_names() {
  std::vector<std::string> n;
  for (TweetKind k : corpus::kAllKinds) {
    for (Entity e : kEntities) {
      append_stat_names(std::string(corpus::kind_label(k)) + "_" +
                            std::string(entity_label(e)),
                        n);
    }
  }
  for (TweetKind k : corpus::kAllKinds) {
    n.push_back(std::string(corpus::kind_label(k)) + "_count");
  }
  for (TweetKind k : corpus::kAllKinds) {
    n.push_back(std::string(corpus::kind_label(k)) + "_text_length_mean");
  }
  append_stat_names("hashtag_tfidf", n);
  append_stat_names("mention_tfidf", n);
  for (const char* s : {"distinct_hashtags", "distinct_urls", "distinct_mentions",
                        "vocabulary_size"}) {
    n.emplace_back(s);
  }
  return n;
}

}  // namespace

std::string_view entity_label(Entity e) {
  switch (e) {
    case Entity::kHashtags: return "hashtags";
    case Entity::kUrls: return "urls";
    case Entity::kMentions: return "mentions";
  }
  return "hashtags";
}

SummaryStats entity_stats(Timeline timeline, TweetKind kind, Entity entity) {
  std::vector<double> counts;
  for (const auto& t : timeline) {
    if (t.kind == kind) {
      counts.push_back(static_cast<double>(entities_of(t, entity).size()));
    }
  }
  return summarize(counts);
}

IdfTable::IdfTable(std::map<std::string, std::size_t, std::less<>> df,
                   std::size_t total_users)
    : df_(std::move(df)), total_users_(total_users) {}

std::size_t IdfTable::df(std::string_view term) const {
  auto it = df_.find(term);
  return it == df_.end() ? 0 : it->second;
}

double IdfTable::idf(std::string_view term) const {
  const double d = static_cast<double>(std::max<std::size_t>(df(term), 1));
  const double n = static_cast<double>(std::max<std::size_t>(total_users_, 1));
  return std::log(n / d);
}

void IdfTable::write_csv(const std::filesystem::path& path) const {
  io::AtomicFile f(path);
  f.stream() << "# total_users=" << total_users_ << "\n";
  f.stream() << "hashtag,df\n";
  for (const auto& [term, d] : df_) {
    f.stream() << io::csv_escape(term) << ',' << d << '\n';
  }
  f.commit();
}

IdfTable IdfTable::read_csv(const std::filesystem::path& path) {
  std::map<std::string, std::size_t, std::less<>> df;
  std::size_t total = 0;
  io::for_each_line(path, [&](std::string_view line) {
    if (line.empty()) return;
    if (line.starts_with("# total_users=")) {
      total = std::stoull(std::string(line.substr(14)));
      return;
    }
    if (line == "hashtag,df") return;
    auto fields = io::split_csv_line(line);
    if (fields.size() != 2) {
      fail(ErrorCode::kMalformedRecord, "idf row must be hashtag,df");
    }
    df.emplace(fields[0], std::stoull(fields[1]));
  });
  return IdfTable(std::move(df), total);
}

std::string normalize_term(std::string_view term, Entity entity) {
  if (entity == Entity::kHashtags) return text::fold_case_utf8(term);
  return std::string(term);
}

IdfTable build_idf(const corpus::Corpus& corpus,
                   std::span<const std::string> users,
                   corpus::TimeWindow window, Entity entity) {
  std::map<std::string, std::size_t, std::less<>> df;
  for (const auto& uid : users) {
    std::set<std::string> seen;
    for (const auto& t : corpus.user_timeline(uid, window)) {
      for (const auto& term : entities_of(t, entity)) {
        seen.insert(normalize_term(term, entity));
      }
    }
    for (const auto& term : seen) ++df[term];
  }
  return IdfTable(std::move(df), users.size());
}

SummaryStats tfidf_stats(Timeline timeline, const IdfTable& idf, Entity entity) {
  std::map<std::string, std::size_t> tf;
  for (const auto& t : timeline) {
    for (const auto& term : entities_of(t, entity)) {
      ++tf[normalize_term(term, entity)];
    }
  }
  std::vector<double> scores;
  scores.reserve(tf.size());
  for (const auto& [term, count] : tf) {
    scores.push_back(static_cast<double>(count) * idf.idf(term));
  }
  return summarize(scores);
}

SummaryStats hashtag_tfidf_stats(const corpus::Corpus& corpus,
                                 std::string_view user_id,
                                 corpus::TimeWindow window,
                                 const IdfTable& idf) {
  return tfidf_stats(corpus.user_timeline(user_id, window), idf,
                     Entity::kHashtags);
}

std::size_t vocabulary_size(Timeline timeline) {
  std::unordered_set<std::string> vocab;
  for (const auto& t : timeline) {
    if (t.kind != TweetKind::kOriginal) continue;
    for (std::string_view raw : text::split_whitespace(t.text)) {
      if (text::is_url_token(raw) || text::is_mention_token(raw)) continue;
      std::string tok = text::normalize_token(raw);
      if (!tok.empty()) vocab.insert(std::move(tok));
    }
  }
  return vocab.size();
}

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = make_names();
  return names;
}

IdfTables build_idf_tables(const corpus::Corpus& corpus,
                           std::span<const std::string> users,
                           corpus::TimeWindow window) {
  return {build_idf(corpus, users, window, Entity::kHashtags),
          build_idf(corpus, users, window, Entity::kMentions)};
}

TextualFeatures extract_textual_features(const corpus::Corpus& corpus,
                                         std::string_view user_id,
                                         corpus::TimeWindow window,
                                         const IdfTables& idf) {
  const Timeline timeline = corpus.user_timeline(user_id, window);
  std::vector<double> v;
  v.reserve(feature_names().size());
  for (TweetKind k : corpus::kAllKinds) {
    for (Entity e : kEntities) append_stat_values(entity_stats(timeline, k, e), v);
  }
  std::array<double, 3> count{};
  std::array<double, 3> length{};
  for (const auto& t : timeline) {
    const auto k = static_cast<std::size_t>(t.kind);
    count[k] += 1.0;
    length[k] += static_cast<double>(text::codepoint_length(t.text));
  }
  v.insert(v.end(), count.begin(), count.end());
  for (std::size_t k = 0; k < 3; ++k) {
    v.push_back(count[k] > 0 ? length[k] / count[k] : kMissing);
  }
  append_stat_values(tfidf_stats(timeline, idf.hashtags, Entity::kHashtags), v);
  append_stat_values(tfidf_stats(timeline, idf.mentions, Entity::kMentions), v);
  for (Entity e : kEntities) {
    std::set<std::string> distinct;
    for (const auto& t : timeline) {
      for (const auto& term : entities_of(t, e)) {
        distinct.insert(normalize_term(term, e));
      }
    }
    v.push_back(static_cast<double>(distinct.size()));
  }
  v.push_back(static_cast<double>(vocabulary_size(timeline)));
  return TextualFeatures(&feature_names(), std::move(v));
}

model::FeatureMatrix extract_family(const corpus::Corpus& corpus,
                                    std::span<const std::string> users,
                                    corpus::TimeWindow window,
                                    const IdfTables& idf, int threads) {
  std::vector<std::vector<double>> rows(users.size());
  parallel_for(users.size(), threads, [&](std::size_t i) {
    rows[i] = extract_textual_features(corpus, users[i], window, idf).values();
  });
  auto m = model::make_block(model::Family::kTextual, feature_names());
  for (std::size_t i = 0; i < users.size(); ++i) m.add_row(users[i], rows[i]);
  return m;
}

}  // namespace susp::textual

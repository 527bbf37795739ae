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

#include "susp/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string_view>

#include "susp/io.hpp"
#include "susp/random.hpp"
#include "susp/wallets.hpp"

namespace susp::synth {

ClassBehavior GeneratorConfig::default_suspended() {
  ClassBehavior b;
  b.account_age_mean_days = 60.0;
  b.account_age_min_days = 1.0;
  b.statuses_per_day = 20.0;
  b.observed_posts_per_day = 1.5;
  b.reaction_log_mean = 5.0;
  b.reaction_log_sigma = 1.3;
  b.duplicate_prob = 0.7;
  b.diurnal = 0.2;
  b.default_image_prob = 0.3;
  b.digit_name_prob = 0.5;
  b.verified_prob = 0.0;
  b.hashtag_rate = 1.5;
  b.url_prob = 0.5;
  b.mention_rate = 0.5;
  b.mimic_prob = 0.4;
  return b;
}

namespace {

void check_behavior(const ClassBehavior& b) {
  const double rates[] = {b.account_age_mean_days, b.account_age_min_days, b.statuses_per_day,
                          b.followers_per_day,     b.friends_per_day,      b.favourites_per_day,
                          b.listed_per_day,        b.rate_sigma,           b.observed_posts_per_day,
                          b.reaction_log_sigma,    b.hashtag_rate,         b.mention_rate};
  for (double r : rates) {
    if (!(r >= 0.0) || !std::isfinite(r)) fail(ErrorCode::kInvalidArgument, "rates must be >= 0");
  }
  const double probs[] = {b.retweet_prob,       b.quote_prob,      b.duplicate_prob,
                          b.diurnal,            b.default_image_prob, b.digit_name_prob,
                          b.verified_prob,      b.url_prob,        b.mimic_prob};
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      fail(ErrorCode::kInvalidArgument, "probabilities must lie in [0, 1]");
    }
  }
  if (b.retweet_prob + b.quote_prob > 1.0) {
    fail(ErrorCode::kInvalidArgument, "retweet_prob + quote_prob must be <= 1");
  }
}

}  // namespace

void GeneratorConfig::validate() const {
  check_behavior(normal);
  check_behavior(suspended);
  if (!(deactivated_fraction >= 0.0 && deactivated_fraction <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "deactivated_fraction must lie in [0, 1]");
  }
  if (windows < 1 || window_days < 1 || snapshots_per_window < 1) {
    fail(ErrorCode::kInvalidArgument, "windows, window_days and snapshots must be >= 1");
  }
  if (vocabulary == 0 || hashtag_pool == 0 || trending_hashtags == 0 || campaign_pool == 0) {
    fail(ErrorCode::kInvalidArgument, "vocabulary and pools must be non-empty");
  }
}

namespace {

constexpr std::array<std::string_view, 24> kSyllables = {
    "ka", "lo", "mi", "re", "ta", "no", "vi", "su", "pe", "da", "ri", "mo",
    "ne", "sa", "ku", "li", "ba", "to", "fe", "zu", "go", "ha", "in", "or"};

constexpr std::array<std::string_view, 20> kCampaignWords = {
    "crypto",  "nft",    "donation", "giveaway", "airdrop", "bitcoin", "eth",
    "wallet",  "mint",   "token",    "presale",  "profit",  "invest",  "free",
    "claim",   "reward", "donate",   "support",  "moon",    "whitelist"};

constexpr std::array<std::string_view, 5> kLangs = {"en", "en", "en", "es", "und"};

// Zipf(s = 1.1) over n items.
class Zipf {
 public:
  explicit Zipf(std::size_t n) : cdf_(n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += 1.0 / std::pow(static_cast<double>(i + 1), 1.1);
      cdf_[i] = acc;
    }
    for (double& c : cdf_) c /= acc;
  }
  std::size_t operator()(Rng& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

std::string make_word(Rng& rng, std::size_t min_syl, std::size_t max_syl) {
  const std::size_t n = min_syl + rng.uniform_index(max_syl - min_syl + 1);
  std::string w;
  for (std::size_t i = 0; i < n; ++i) w += kSyllables[rng.uniform_index(kSyllables.size())];
  return w;
}

std::string random_token(Rng& rng, std::size_t n) {
  static constexpr std::string_view kChars = "abcdefghijkmnopqrstuvwxyz0123456789";
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += kChars[rng.uniform_index(kChars.size())];
  return s;
}

std::string wallet_address(Rng& rng) {
  if (rng.bernoulli(0.5)) {
    std::vector<std::uint8_t> payload(21);
    payload[0] = 0x00;
    for (std::size_t i = 1; i < payload.size(); ++i) {
      payload[i] = static_cast<std::uint8_t>(rng.uniform_index(256));
    }
    return clustering::base58::encode_check(payload);
  }
  static constexpr std::string_view kHex = "0123456789abcdef";
  std::string s = "0x";
  for (int i = 0; i < 40; ++i) s += kHex[rng.uniform_index(16)];
  return s;
}

struct Post {
  std::string text;
  std::vector<std::string> hashtags;
  std::vector<std::string> urls;
};

struct World {
  std::vector<std::string> vocabulary;
  std::vector<std::string> hashtags;
  std::vector<std::string> trending;
  std::vector<std::vector<Post>> campaigns;  // per campaign generation
  Zipf word_zipf;
  Zipf tag_zipf;
  Zipf trend_zipf;
  Zipf campaign_zipf;

  World(const GeneratorConfig& c, std::uint64_t seed)
      : word_zipf(c.vocabulary), tag_zipf(c.hashtag_pool), trend_zipf(c.trending_hashtags),
        campaign_zipf(c.campaign_pool) {
    Rng rng(derive_seed(seed, "synth.world"));
    for (std::size_t i = 0; i < c.vocabulary; ++i) vocabulary.push_back(make_word(rng, 1, 4));
    for (std::size_t i = 0; i < c.hashtag_pool; ++i) hashtags.push_back(make_word(rng, 2, 4));
    for (std::size_t i = 0; i < c.trending_hashtags; ++i) {
      trending.push_back(std::string(kCampaignWords[rng.uniform_index(kCampaignWords.size())]) +
                         make_word(rng, 1, 2));
    }
  }

  Post campaign_post(Rng& rng) const {
    Post p;
    const std::size_t n = 8 + rng.uniform_index(8);
    for (std::size_t i = 0; i < n; ++i) {
      if (!p.text.empty()) p.text += ' ';
      p.text += rng.bernoulli(0.5) ? std::string(kCampaignWords[rng.uniform_index(kCampaignWords.size())])
                                   : vocabulary[word_zipf(rng)];
    }
    if (rng.bernoulli(0.35)) p.text += " " + wallet_address(rng);
    const std::size_t tags = 1 + rng.uniform_index(3);
    for (std::size_t i = 0; i < tags; ++i) {
      const auto& t = trending[trend_zipf(rng)];
      if (std::find(p.hashtags.begin(), p.hashtags.end(), t) != p.hashtags.end()) continue;
      p.hashtags.push_back(t);
      p.text += " #" + t;
    }
    const std::string url = "https://t.co/" + random_token(rng, 10);
    p.urls.push_back(url);
    p.text += " " + url;
    return p;
  }

  Post ordinary_post(Rng& rng, const ClassBehavior& b, bool trending_tags) const {
    Post p;
    const std::size_t n = 5 + rng.uniform_index(14);
    for (std::size_t i = 0; i < n; ++i) {
      if (!p.text.empty()) p.text += ' ';
      p.text += vocabulary[word_zipf(rng)];
    }
    const auto tags = static_cast<std::size_t>(rng.poisson(b.hashtag_rate));
    for (std::size_t i = 0; i < tags; ++i) {
      const auto& t = trending_tags ? trending[trend_zipf(rng)] : hashtags[tag_zipf(rng)];
      if (std::find(p.hashtags.begin(), p.hashtags.end(), t) != p.hashtags.end()) continue;
      p.hashtags.push_back(t);
      p.text += " #" + t;
    }
    if (rng.bernoulli(b.url_prob)) {
      const std::string url = "https://t.co/" + random_token(rng, 10);
      p.urls.push_back(url);
      p.text += " " + url;
    }
    return p;
  }
};

enum class Cls { kNormal, kSuspended, kDeactivated };

struct UserPlan {
  std::string id;
  Cls cls;
  const ClassBehavior* b;
  const ClassBehavior* act;  // posting behavior; the normal one for mimics
  Epoch created = 0;
  Epoch active_end = 0;
  double statuses_rate = 0, followers_rate = 0, friends_rate = 0, favourites_rate = 0,
         listed_rate = 0;
  double peak_hour = 15.0;
};

std::int64_t count_at(double rate, Epoch created, Epoch t) {
  const double days = std::max(0.0, static_cast<double>(t - created) / kSecondsPerDay);
  return static_cast<std::int64_t>(std::floor(rate * days));
}

// Preferential attachment over the users of one class.
class Attachment {
 public:
  explicit Attachment(std::vector<std::size_t> members) : members_(std::move(members)) {}
  bool empty() const { return members_.empty(); }
  std::size_t draw(Rng& rng) {
    std::size_t pick;
    if (!tickets_.empty() && rng.bernoulli(0.8)) {
      pick = tickets_[rng.uniform_index(tickets_.size())];
    } else {
      pick = members_[rng.uniform_index(members_.size())];
    }
    tickets_.push_back(pick);
    return pick;
  }

 private:
  std::vector<std::size_t> members_;
  std::vector<std::size_t> tickets_;
};

}  // namespace

GeneratedCorpus generate(const GeneratorConfig& config, std::uint64_t seed) {
  config.validate();
  const World world(config, seed);
  GeneratedCorpus out;
  Rng rng(derive_seed(seed, "synth.corpus"));
  std::uint64_t tweet_counter = 0;
  std::uint64_t ref_counter = 0;
  const double day = static_cast<double>(kSecondsPerDay);

  for (int w = 0; w < config.windows; ++w) {
    const Epoch wstart = config.start + static_cast<Epoch>(w) * config.window_days * kSecondsPerDay;
    const Epoch wend = wstart + static_cast<Epoch>(config.window_days) * kSecondsPerDay;
    const double wdays = static_cast<double>(config.window_days);
    const bool drifted = config.drift && w >= 1;

    // Campaign texts: one pool per window generation (fresh after drift).
    std::vector<Post> campaigns;
    for (std::size_t i = 0; i < config.campaign_pool; ++i) campaigns.push_back(world.campaign_post(rng));

    std::vector<Cls> classes;
    classes.insert(classes.end(), config.normal_users, Cls::kNormal);
    classes.insert(classes.end(), config.suspended_users, Cls::kSuspended);
    classes.insert(classes.end(),
                   static_cast<std::size_t>(std::llround(config.deactivated_fraction *
                                                         static_cast<double>(config.normal_users))),
                   Cls::kDeactivated);
    rng.shuffle(classes);

    std::vector<UserPlan> users(classes.size());
    std::vector<std::size_t> members[2];
    for (std::size_t i = 0; i < users.size(); ++i) {
      auto& u = users[i];
      char id[32];
      std::snprintf(id, sizeof id, "%d%07zu", 1 + w, 1000000 + i);
      u.id = id;
      u.cls = classes[i];
      u.b = u.cls == Cls::kSuspended ? &config.suspended : &config.normal;
      const bool mimic = u.cls == Cls::kSuspended && rng.bernoulli(u.b->mimic_prob);
      u.act = mimic ? &config.normal : u.b;
      members[u.act == &config.suspended].push_back(i);
      const double age = u.b->account_age_min_days + rng.exponential(u.b->account_age_mean_days);
      u.created = wend - static_cast<Epoch>(age * day);
      // Collection ends late in the window for everyone; for suspended and
      // deactivated users that moment is also the status date.
      u.active_end = wstart + static_cast<Epoch>(rng.uniform(0.8, 1.0) * wdays * day);
      auto rate = [&](double mean) { return mean * std::exp(rng.normal(0.0, u.b->rate_sigma)); };
      u.statuses_rate = rate(u.b->statuses_per_day);
      u.followers_rate = rate(u.b->followers_per_day);
      u.friends_rate = rate(u.b->friends_per_day);
      u.favourites_rate = rate(u.b->favourites_per_day);
      u.listed_rate = rate(u.b->listed_per_day);
      u.peak_hour = rng.normal(15.0, 2.0);
    }
    Attachment attach[2] = {Attachment(members[0]), Attachment(members[1])};

    for (auto& u : users) {
      const ClassBehavior& b = *u.b;
      const ClassBehavior& pb = *u.act;
      const bool bot = u.act == &config.suspended;

      // Profile.
      std::string first = make_word(rng, 2, 3);
      std::string last = make_word(rng, 2, 3);
      first[0] = static_cast<char>(first[0] - 'a' + 'A');
      last[0] = static_cast<char>(last[0] - 'a' + 'A');
      const std::string name = first + " " + last;
      std::string screen = first + last;
      std::transform(screen.begin(), screen.end(), screen.begin(),
                     [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); });
      if (rng.bernoulli(b.digit_name_prob)) {
        screen += std::to_string(1000 + rng.uniform_index(99999000));
      }
      const Post bio = world.ordinary_post(rng, b, false);
      const bool default_image = rng.bernoulli(b.default_image_prob);
      const bool default_profile = rng.bernoulli(b.default_image_prob);
      const bool verified = rng.bernoulli(b.verified_prob);

      const Epoch snap_end = std::min(u.active_end, wend);
      for (int k = 0; k < config.snapshots_per_window; ++k) {
        const double frac = (static_cast<double>(k) + 0.5) / config.snapshots_per_window;
        Epoch t = wstart + static_cast<Epoch>(frac * static_cast<double>(snap_end - wstart));
        t = std::max(t, u.created + static_cast<Epoch>(k + 1) * 3600);
        corpus::UserSnapshot s;
        s.user_id = u.id;
        s.observed_at = t;
        s.account_created_at = u.created;
        s.followers = count_at(u.followers_rate, u.created, t);
        s.friends = count_at(u.friends_rate, u.created, t);
        s.statuses = count_at(u.statuses_rate, u.created, t);
        s.favourites = count_at(u.favourites_rate, u.created, t);
        s.listed = count_at(u.listed_rate, u.created, t);
        s.verified = verified;
        s.default_profile = default_profile;
        s.default_profile_image = default_image;
        s.name = name;
        s.screen_name = screen;
        s.description = bio.text;
        out.snapshots.push_back(std::move(s));
      }

      // Collected posts.
      const Epoch from = std::max(wstart, u.created + 60);
      const Epoch to = u.active_end;
      if (to > from) {
        const double span_days = static_cast<double>(to - from) / day;
        const auto count = rng.poisson(pb.observed_posts_per_day * span_days);
        std::vector<Epoch> times;
        for (std::int64_t k = 0; k < count; ++k) {
          Epoch t = 0;
          for (int attempt = 0; attempt < 8; ++attempt) {
            const double d = std::floor(rng.uniform(0.0, span_days + 1.0));
            double hour = rng.bernoulli(pb.diurnal) ? rng.normal(u.peak_hour, 3.0)
                                                   : rng.uniform(0.0, 24.0);
            hour = std::fmod(std::fmod(hour, 24.0) + 24.0, 24.0);
            const Epoch day_start = from - (from % kSecondsPerDay);
            t = day_start + static_cast<Epoch>(d * day + hour * 3600.0);
            if (t >= from && t < to) break;
            t = from + static_cast<Epoch>(rng.uniform(0.0, static_cast<double>(to - from)));
          }
          times.push_back(std::clamp(t, from, to - 1));
        }
        std::sort(times.begin(), times.end());
        for (Epoch t : times) {
          corpus::Tweet tw;
          char tid[32];
          std::snprintf(tid, sizeof tid, "%019llu",
                        static_cast<unsigned long long>(1500000000000000000ULL + ++tweet_counter));
          tw.tweet_id = tid;
          tw.user_id = u.id;
          tw.created_at = t;
          tw.lang = std::string(kLangs[rng.uniform_index(kLangs.size())]);
          const double r = rng.uniform();
          tw.kind = r < pb.retweet_prob                  ? corpus::TweetKind::kRetweet
                    : r < pb.retweet_prob + pb.quote_prob ? corpus::TweetKind::kQuote
                                                        : corpus::TweetKind::kOriginal;
          const bool campaign = bot && !drifted && rng.bernoulli(pb.duplicate_prob);
          Post p = campaign ? campaigns[world.campaign_zipf(rng)]
                            : world.ordinary_post(rng, pb, bot && !drifted);
          auto& pool = attach[bot ? 1 : 0];
          if (tw.kind != corpus::TweetKind::kOriginal && !pool.empty()) {
            const std::size_t target = pool.draw(rng);
            const double delay = std::min(std::exp(rng.normal(pb.reaction_log_mean, pb.reaction_log_sigma)),
                                          30.0 * day);
            tw.referenced_user_id = users[target].id;
            tw.referenced_tweet_id = "9" + std::to_string(1000000000000000000ULL + ++ref_counter);
            tw.referenced_created_at = t - static_cast<Epoch>(delay);
          } else {
            tw.kind = corpus::TweetKind::kOriginal;
          }
          if (tw.kind != corpus::TweetKind::kRetweet && !pool.empty()) {
            const auto mentions = static_cast<std::size_t>(rng.poisson(pb.mention_rate));
            for (std::size_t k = 0; k < mentions; ++k) {
              const std::string& m = users[pool.draw(rng)].id;
              if (m == u.id || std::find(tw.mentions.begin(), tw.mentions.end(), m) != tw.mentions.end()) {
                continue;
              }
              tw.mentions.push_back(m);
              // Copied campaign texts stay verbatim.
              if (!campaign) p.text += " @" + m;
            }
          }
          tw.text = std::move(p.text);
          tw.hashtags = std::move(p.hashtags);
          tw.urls = std::move(p.urls);
          out.tweets.push_back(std::move(tw));
        }
      }

      corpus::AccountLabel label;
      label.user_id = u.id;
      if (u.cls == Cls::kSuspended) {
        label.status = corpus::AccountStatus::kSuspended;
        label.status_date = u.active_end;
      } else if (u.cls == Cls::kDeactivated) {
        label.status = corpus::AccountStatus::kDeactivated;
        label.status_date = u.active_end;
      }
      out.labels.push_back(std::move(label));
    }
  }
  return out;
}

CorpusPaths default_paths(const std::filesystem::path& dir) {
  return {dir / "tweets.jsonl", dir / "snapshots.jsonl", dir / "labels.csv"};
}

void write_corpus(const GeneratedCorpus& c, const CorpusPaths& paths) {
  {
    io::AtomicFile f(paths.tweets);
    for (const auto& t : c.tweets) f.stream() << corpus::to_json_line(t) << '\n';
    f.commit();
  }
  {
    io::AtomicFile f(paths.snapshots);
    for (const auto& s : c.snapshots) f.stream() << corpus::to_json_line(s) << '\n';
    f.commit();
  }
  io::AtomicFile f(paths.labels);
  f.stream() << "user_id,status,status_date\n";
  for (const auto& l : c.labels) f.stream() << corpus::to_csv_row(l) << '\n';
  f.commit();
}

}  // namespace susp::synth

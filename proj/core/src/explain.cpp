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

#include "susp/explain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "susp/common.hpp"
#include "susp/io.hpp"
#include "susp/parallel.hpp"
#include "susp/random.hpp"

namespace susp::explain {

void Background::add_row(std::span<const double> row) {
  if (row.size() != cols) fail(ErrorCode::kDimensionMismatch, "background row width");
  values.insert(values.end(), row.begin(), row.end());
}

namespace {

void check_inputs(std::span<const double> instance, const Background& bg) {
  if (bg.rows() == 0) fail(ErrorCode::kInvalidArgument, "background set is empty");
  if (bg.cols != instance.size()) {
    fail(ErrorCode::kDimensionMismatch, "instance and background widths differ");
  }
}

double background_mean(const ModelFn& f, const Background& bg) {
  double s = 0.0;
  for (std::size_t r = 0; r < bg.rows(); ++r) s += f(bg.row(r));
  return s / static_cast<double>(bg.rows());
}

}  // namespace

Explanation shapley_exact(const ModelFn& f, std::span<const double> instance,
                          const Background& bg) {
  const std::size_t m = instance.size();
  if (m > kMaxExactFeatures) {
    fail(ErrorCode::kTooManyFeatures,
         "exact Shapley supports at most 15 features, got " + std::to_string(m));
  }
  check_inputs(instance, bg);
  const std::size_t coalitions = std::size_t{1} << m;
  std::vector<double> v(coalitions, 0.0);
  std::vector<double> z(m);
  for (std::size_t s = 0; s < coalitions; ++s) {
    double acc = 0.0;
    for (std::size_t r = 0; r < bg.rows(); ++r) {
      const auto b = bg.row(r);
      for (std::size_t i = 0; i < m; ++i) z[i] = (s >> i) & 1 ? instance[i] : b[i];
      acc += f(z);
    }
    v[s] = acc / static_cast<double>(bg.rows());
  }
  // weight[k] = k! (m - k - 1)! / m!
  std::vector<double> weight(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    weight[k] = std::exp(std::lgamma(static_cast<double>(k + 1)) +
                         std::lgamma(static_cast<double>(m - k)) -
                         std::lgamma(static_cast<double>(m + 1)));
  }
  Explanation e;
  e.values.assign(instance.begin(), instance.end());
  e.phi.assign(m, 0.0);
  for (std::size_t s = 0; s < coalitions; ++s) {
    const auto k = static_cast<std::size_t>(std::popcount(s));
    for (std::size_t i = 0; i < m; ++i) {
      if ((s >> i) & 1) continue;
      e.phi[i] += weight[k] * (v[s | (std::size_t{1} << i)] - v[s]);
    }
  }
  e.base_value = v[0];
  e.output = f(instance);
  return e;
}

Explanation shapley_sampled(const ModelFn& f, std::span<const double> instance,
                            const Background& bg, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) fail(ErrorCode::kInvalidArgument, "samples must be >= 1");
  check_inputs(instance, bg);
  const std::size_t m = instance.size();
  Rng rng(seed);
  Explanation e;
  e.values.assign(instance.begin(), instance.end());
  e.phi.assign(m, 0.0);
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> z(m);

  auto walk = [&](auto begin, auto end, std::span<const double> b) {
    std::copy(b.begin(), b.end(), z.begin());
    double prev = f(z);
    for (auto it = begin; it != end; ++it) {
      z[*it] = instance[*it];
      const double cur = f(z);
      e.phi[*it] += cur - prev;
      prev = cur;
    }
  };
  std::size_t done = 0;
  while (done < samples) {
    rng.shuffle(perm);
    const auto b = bg.row(rng.uniform_index(bg.rows()));
    walk(perm.begin(), perm.end(), b);
    ++done;
    if (done < samples) {
      walk(perm.rbegin(), perm.rend(), b);
      ++done;
    }
  }
  for (double& p : e.phi) p /= static_cast<double>(samples);

  e.base_value = background_mean(f, bg);
  e.output = f(instance);
  const double residual =
      (e.output - e.base_value) - std::accumulate(e.phi.begin(), e.phi.end(), 0.0);
  double total_abs = 0.0;
  for (double p : e.phi) total_abs += std::abs(p);
  if (m > 0) {
    for (double& p : e.phi) {
      p += total_abs > 0.0 ? residual * std::abs(p) / total_abs
                           : residual / static_cast<double>(m);
    }
  }
  return e;
}

ImpactSummary impact_summary(std::span<const Explanation> explanations) {
  if (explanations.empty()) fail(ErrorCode::kInvalidArgument, "no explanations to summarize");
  const auto& first = explanations.front();
  if (!first.features) fail(ErrorCode::kSchemaMismatch, "explanation lacks feature names");
  ImpactSummary s;
  s.features = *first.features;
  const std::size_t m = s.features.size();
  s.mean_abs_phi.assign(m, 0.0);
  s.scatter.resize(m);
  for (const auto& e : explanations) {
    if (!e.features || (e.features != first.features && *e.features != *first.features) ||
        e.phi.size() != m || e.values.size() != m) {
      fail(ErrorCode::kSchemaMismatch, "explanations do not share one schema");
    }
    for (std::size_t i = 0; i < m; ++i) {
      s.mean_abs_phi[i] += std::abs(e.phi[i]);
      s.scatter[i].emplace_back(e.values[i], e.phi[i]);
    }
  }
  for (double& v : s.mean_abs_phi) v /= static_cast<double>(explanations.size());
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (s.mean_abs_phi[a] != s.mean_abs_phi[b]) return s.mean_abs_phi[a] > s.mean_abs_phi[b];
    return s.features[a] < s.features[b];
  });
  for (std::size_t r = 0; r < m; ++r) {
    s.ranking.push_back({s.features[order[r]], s.mean_abs_phi[order[r]], r + 1});
  }
  return s;
}

ModelFn margin_function(const model::TrainedModel& m) {
  return [&m](std::span<const double> row) { return m.margin(row); };
}

Background sample_background(const model::TrainedModel& m, const model::FeatureMatrix& x,
                             std::size_t n, std::uint64_t seed) {
  const model::FeatureMatrix p = model::project(m, x);
  Background bg;
  bg.cols = p.cols();
  Rng rng(seed);
  auto rows = rng.sample_without_replacement(p.rows(), std::min(n, p.rows()));
  std::sort(rows.begin(), rows.end());
  for (std::size_t r : rows) bg.add_row(p.row(r));
  return bg;
}

std::vector<Explanation> explain_matrix(const model::TrainedModel& m,
                                        const model::FeatureMatrix& x,
                                        const model::FeatureMatrix& background_source,
                                        const ExplainOptions& options) {
  const model::FeatureMatrix p = model::project(m, x);
  const Background bg = sample_background(m, background_source, options.background_rows,
                                          derive_seed(options.seed, "explain.background"));
  const auto names = std::make_shared<const std::vector<std::string>>(m.schema);
  const ModelFn f = margin_function(m);
  const bool exact = !options.force_sampled && p.cols() <= kMaxExactFeatures;
  std::vector<Explanation> out(p.rows());
  parallel_for(p.rows(), options.threads, [&](std::size_t r) {
    out[r] = exact ? shapley_exact(f, p.row(r), bg)
                   : shapley_sampled(f, p.row(r), bg, options.samples,
                                     derive_seed(options.seed, static_cast<std::uint64_t>(r)));
    out[r].id = p.user_ids[r];
    out[r].features = names;
  });
  return out;
}

void write_explanations_csv(const std::filesystem::path& path,
                            std::span<const Explanation> explanations) {
  io::AtomicFile f(path);
  auto& out = f.stream();
  out << "user_id,feature,value,phi\n";
  for (const auto& e : explanations) {
    for (std::size_t i = 0; i < e.phi.size(); ++i) {
      out << io::csv_escape(e.id) << ',' << io::csv_escape((*e.features)[i]) << ','
          << io::format_double(e.values[i]) << ',' << io::format_double(e.phi[i]) << '\n';
    }
  }
  f.commit();
}

void write_summary_csv(const std::filesystem::path& path, const ImpactSummary& summary) {
  io::AtomicFile f(path);
  auto& out = f.stream();
  out << "feature,mean_abs_phi,rank\n";
  for (const auto& r : summary.ranking) {
    out << io::csv_escape(r.feature) << ',' << io::format_double(r.mean_abs_phi) << ','
        << r.rank << '\n';
  }
  f.commit();
}

}  // namespace susp::explain

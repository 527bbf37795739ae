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

// Histogram gradient boosting for the logistic loss.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "gbdt_internal.hpp"
#include "susp/parallel.hpp"

namespace susp::model::detail {

namespace {

struct Binned {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<std::uint8_t> bins;           // column-major, m x n
  std::vector<std::vector<double>> edges;   // per feature, ascending
  std::size_t max_bins = 0;

  const std::uint8_t* column(std::size_t f) const { return bins.data() + f * n; }
};

// Edges are midpoints between adjacent distinct values, thinned to
// max_bins - 1 by cumulative count when a column has more distinct values.
std::vector<double> column_edges(std::vector<double> values, std::size_t max_bins) {
  std::sort(values.begin(), values.end());
  std::vector<double> uniq;
  std::vector<std::size_t> counts;
  for (double v : values) {
    if (uniq.empty() || v != uniq.back()) {
      uniq.push_back(v);
      counts.push_back(1);
    } else {
      ++counts.back();
    }
  }
  std::vector<double> edges;
  if (uniq.size() <= 1) return edges;
  if (uniq.size() <= max_bins) {
    for (std::size_t i = 0; i + 1 < uniq.size(); ++i) {
      edges.push_back(uniq[i] + (uniq[i + 1] - uniq[i]) / 2.0);
    }
    return edges;
  }
  const double n = static_cast<double>(values.size());
  std::size_t cum = 0;
  std::size_t q = 1;
  for (std::size_t i = 0; i + 1 < uniq.size() && q < max_bins; ++i) {
    cum += counts[i];
    if (static_cast<double>(cum) >= static_cast<double>(q) * n / static_cast<double>(max_bins)) {
      edges.push_back(uniq[i] + (uniq[i + 1] - uniq[i]) / 2.0);
      while (q < max_bins &&
             static_cast<double>(cum) >= static_cast<double>(q) * n / static_cast<double>(max_bins)) {
        ++q;
      }
    }
  }
  return edges;
}

Binned bin_matrix(const std::vector<double>& x, std::size_t n, std::size_t m,
                  std::size_t max_bins, int threads) {
  Binned b;
  b.n = n;
  b.m = m;
  b.max_bins = max_bins;
  b.bins.resize(n * m);
  b.edges.resize(m);
  parallel_for(m, threads, [&](std::size_t f) {
    std::vector<double> col(n);
    for (std::size_t r = 0; r < n; ++r) col[r] = x[r * m + f];
    b.edges[f] = column_edges(col, max_bins);
    const auto& e = b.edges[f];
    std::uint8_t* out = b.bins.data() + f * n;
    for (std::size_t r = 0; r < n; ++r) {
      out[r] = static_cast<std::uint8_t>(std::lower_bound(e.begin(), e.end(), col[r]) - e.begin());
    }
  });
  return b;
}

struct Split {
  double gain = 0.0;
  int feature = -1;
  int bin = -1;
};

class Grower {
 public:
  Grower(const Binned& data, const GbdtParams& p, int threads,
         std::vector<double>& gain_acc)
      : data_(data), p_(p), threads_(threads), gain_acc_(gain_acc),
        stride_(data.max_bins) {}

  Tree grow(const std::vector<double>& g, const std::vector<double>& h,
            std::vector<std::uint32_t>& rows) {
    g_ = &g;
    h_ = &h;
    tree_ = Tree{};
    std::vector<double> hist(2 * data_.m * stride_);
    build_hist(rows.data(), rows.size(), hist);
    node(rows.data(), rows.size(), hist, 0);
    return std::move(tree_);
  }

 private:
  void build_hist(const std::uint32_t* rows, std::size_t count, std::vector<double>& hist) {
    std::fill(hist.begin(), hist.end(), 0.0);
    const auto& g = *g_;
    const auto& h = *h_;
    parallel_for(data_.m, threads_, [&](std::size_t f) {
      if (data_.edges[f].empty()) return;
      const std::uint8_t* col = data_.column(f);
      double* hg = hist.data() + 2 * f * stride_;
      double* hh = hg + stride_;
      for (std::size_t i = 0; i < count; ++i) {
        const std::uint32_t r = rows[i];
        hg[col[r]] += g[r];
        hh[col[r]] += h[r];
      }
    });
  }

  Split best_split(const std::vector<double>& hist, double G, double H) const {
    std::vector<Split> per_feature(data_.m);
    const double lambda = p_.lambda;
    const double parent = G * G / (H + lambda);
    parallel_for(data_.m, threads_, [&](std::size_t f) {
      const std::size_t nb = data_.edges[f].size() + 1;
      if (nb < 2) return;
      const double* hg = hist.data() + 2 * f * stride_;
      const double* hh = hg + stride_;
      double gl = 0.0;
      double hl = 0.0;
      Split best;
      for (std::size_t b = 0; b + 1 < nb; ++b) {
        gl += hg[b];
        hl += hh[b];
        const double gr = G - gl;
        const double hr = H - hl;
        if (hl < p_.min_child_weight || hr < p_.min_child_weight) continue;
        const double gain = 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent);
        if (gain > best.gain) {
          best.gain = gain;
          best.feature = static_cast<int>(f);
          best.bin = static_cast<int>(b);
        }
      }
      per_feature[f] = best;
    });
    Split best;
    for (const auto& s : per_feature) {
      if (s.feature >= 0 && s.gain > best.gain) best = s;
    }
    return best;
  }

  int add_leaf(double G, double H) {
    const int id = static_cast<int>(tree_.size());
    tree_.feature.push_back(-1);
    tree_.threshold.push_back(0.0);
    tree_.left.push_back(-1);
    tree_.right.push_back(-1);
    tree_.value.push_back(-G / (H + p_.lambda) * p_.learning_rate);
    return id;
  }

  int node(std::uint32_t* rows, std::size_t count, std::vector<double>& hist, int depth) {
    double G = 0.0;
    double H = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      G += (*g_)[rows[i]];
      H += (*h_)[rows[i]];
    }
    if (depth >= p_.max_depth || count < 2) return add_leaf(G, H);
    const Split s = best_split(hist, G, H);
    if (s.feature < 0 || !(s.gain > 1e-12)) return add_leaf(G, H);

    const auto f = static_cast<std::size_t>(s.feature);
    const std::uint8_t* col = data_.column(f);
    const auto split_bin = static_cast<std::uint8_t>(s.bin);
    std::uint32_t* mid = std::stable_partition(
        rows, rows + count, [&](std::uint32_t r) { return col[r] <= split_bin; });
    const auto n_left = static_cast<std::size_t>(mid - rows);
    const std::size_t n_right = count - n_left;
    if (n_left == 0 || n_right == 0) return add_leaf(G, H);

    gain_acc_[f] += s.gain;
    const int id = static_cast<int>(tree_.size());
    tree_.feature.push_back(s.feature);
    tree_.threshold.push_back(data_.edges[f][static_cast<std::size_t>(s.bin)]);
    tree_.left.push_back(-1);
    tree_.right.push_back(-1);
    tree_.value.push_back(0.0);

    // Build the smaller child's histogram; the larger one is the difference.
    std::vector<double> small(hist.size());
    const bool left_small = n_left <= n_right;
    if (left_small) {
      build_hist(rows, n_left, small);
    } else {
      build_hist(mid, n_right, small);
    }
    for (std::size_t i = 0; i < hist.size(); ++i) hist[i] -= small[i];
    std::vector<double>& left_hist = left_small ? small : hist;
    std::vector<double>& right_hist = left_small ? hist : small;

    const int l = node(rows, n_left, left_hist, depth + 1);
    const int r = node(mid, n_right, right_hist, depth + 1);
    tree_.left[static_cast<std::size_t>(id)] = l;
    tree_.right[static_cast<std::size_t>(id)] = r;
    return id;
  }

  const Binned& data_;
  const GbdtParams& p_;
  int threads_;
  std::vector<double>& gain_acc_;
  std::size_t stride_;
  const std::vector<double>* g_ = nullptr;
  const std::vector<double>* h_ = nullptr;
  Tree tree_;
};

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double log_loss(const std::vector<double>& f, std::span<const int> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    // log(1 + exp(-z)) for z = +-f, stable for large |f|.
    const double z = y[i] == 1 ? f[i] : -f[i];
    s += z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
  }
  return s / static_cast<double>(f.size());
}

}  // namespace

void fit_gbdt(const std::vector<double>& x, std::size_t n, std::size_t m,
              std::span<const int> y, const GbdtParams& p, int threads,
              TrainedModel& out) {
  if (p.max_bins < 2 || p.max_bins > 256) {
    fail(ErrorCode::kInvalidArgument, "max_bins must lie in [2, 256]");
  }
  const Binned data = bin_matrix(x, n, m, static_cast<std::size_t>(p.max_bins), threads);
  double pos = 0.0;
  for (int v : y) pos += v;
  const double prior = std::clamp(pos / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
  out.base_score = std::log(prior / (1.0 - prior));
  out.trees.clear();
  out.training_loss.clear();

  std::vector<double> f(n, out.base_score);
  std::vector<double> g(n);
  std::vector<double> h(n);
  std::vector<double> gain(m, 0.0);
  std::vector<std::uint32_t> rows(n);
  Grower grower(data, p, threads, gain);
  for (int round = 0; round < p.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double pr = sigmoid(f[i]);
      g[i] = pr - y[i];
      h[i] = std::max(pr * (1.0 - pr), 1e-16);
    }
    std::iota(rows.begin(), rows.end(), 0u);
    Tree t = grower.grow(g, h, rows);
    for (std::size_t i = 0; i < n; ++i) {
      f[i] += t.predict(std::span<const double>(x.data() + i * m, m));
    }
    out.trees.push_back(std::move(t));
    out.training_loss.push_back(log_loss(f, y));
  }
  const double total = std::accumulate(gain.begin(), gain.end(), 0.0);
  out.importance.assign(m, 0.0);
  if (total > 0.0) {
    for (std::size_t j = 0; j < m; ++j) out.importance[j] = gain[j] / total;
  }
}

}  // namespace susp::model::detail

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

#include "susp/text_embedding.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <nlohmann/json.hpp>

#include "susp/io.hpp"
#include "susp/random.hpp"
#include "susp/text.hpp"

namespace susp::embedding {

void EmbeddingMatrix::add_row(std::string id, std::span<const double> row) {
  if (row.size() != dim_) {
    fail(ErrorCode::kDimensionMismatch,
         "row width " + std::to_string(row.size()) + " != " + std::to_string(dim_));
  }
  for (double v : row) {
    if (!std::isfinite(v)) {
      fail(ErrorCode::kInvalidArgument, "non-finite embedding value for " + id);
    }
  }
  if (!index_.emplace(id, ids_.size()).second) {
    fail(ErrorCode::kInvalidArgument, "duplicate embedding id " + id);
  }
  ids_.push_back(std::move(id));
  data_.insert(data_.end(), row.begin(), row.end());
}

std::optional<std::size_t> EmbeddingMatrix::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v),
                              static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f32(std::ostream& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

class Reader {
 public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

  std::string_view take(std::size_t n) {
    if (pos_ + n > bytes_.size()) {
      fail(ErrorCode::kMalformedRecord, "truncated binary file");
    }
    std::string_view v(bytes_.data() + pos_, n);
    pos_ += n;
    return v;
  }
  std::uint32_t u32() {
    auto b = take(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
      v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(i)]);
    }
    return v;
  }
  double f32() { return std::bit_cast<float>(u32()); }
  std::string_view rest() { return take(bytes_.size() - pos_); }

 private:
  std::string bytes_;
  std::size_t pos_ = 0;
};

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

void write_emb(const std::filesystem::path& path, const EmbeddingMatrix& m) {
  io::AtomicFile f(path, true);
  auto& out = f.stream();
  out.write("EMB1", 4);
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.dim()));
  for (double v : m.data()) put_f32(out, v);
  for (const auto& id : m.ids()) out << id << '\n';
  f.commit();
}

EmbeddingMatrix read_emb(const std::filesystem::path& path) {
  Reader r(io::read_file(path));
  if (r.take(4) != "EMB1") fail(ErrorCode::kMalformedRecord, "bad EMB1 magic");
  const std::uint32_t count = r.u32();
  const std::uint32_t dim = r.u32();
  std::vector<double> data(static_cast<std::size_t>(count) * dim);
  for (auto& v : data) v = r.f32();
  std::string_view ids = r.rest();
  EmbeddingMatrix m(dim);
  std::size_t pos = 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t nl = ids.find('\n', pos);
    if (nl == std::string_view::npos) {
      fail(ErrorCode::kMalformedRecord, "EMB1 id list truncated");
    }
    m.add_row(std::string(ids.substr(pos, nl - pos)),
              std::span<const double>(data.data() + i * dim, dim));
    pos = nl + 1;
  }
  return m;
}

HashingEncoder::HashingEncoder(std::size_t dim) : dim_(dim) {
  if (dim == 0) fail(ErrorCode::kInvalidArgument, "encoder dim must be > 0");
}

std::vector<double> HashingEncoder::encode(std::string_view text_in) const {
  // Fold case and collapse whitespace runs, then bracket with boundary marks.
  std::u32string cps;
  cps.push_back(0x02);
  bool in_space = false;
  for (char32_t c : text::fold_case(text::decode_utf8(text_in))) {
    if (text::is_space(c)) {
      in_space = true;
      continue;
    }
    if (in_space && cps.size() > 1) cps.push_back(U' ');
    in_space = false;
    cps.push_back(c);
  }
  cps.push_back(0x03);

  std::vector<double> v(dim_, 0.0);
  for (std::size_t n = 3; n <= 5; ++n) {
    if (cps.size() < n) break;
    for (std::size_t i = 0; i + n <= cps.size(); ++i) {
      const std::string gram = text::encode_utf8(std::u32string_view(cps).substr(i, n));
      const std::uint64_t h = text::fnv1a64(gram) ^ (n * 0x9e3779b97f4a7c15ULL);
      const std::uint64_t mixed = h * 0xff51afd7ed558ccdULL;
      const std::size_t bucket = static_cast<std::size_t>((mixed >> 17) % dim_);
      v[bucket] += (mixed >> 63) != 0 ? -1.0 : 1.0;
    }
  }
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (norm2 == 0.0) {
    v[text::fnv1a64("") % dim_] = 1.0;
    return v;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
  return v;
}

EmbeddingMatrix HashingEncoder::embed(std::span<const std::string> ids,
                                      std::span<const std::string> texts) const {
  if (ids.size() != texts.size()) {
    fail(ErrorCode::kInvalidArgument, "ids and texts differ in length");
  }
  EmbeddingMatrix m(dim_);
  for (std::size_t i = 0; i < ids.size(); ++i) m.add_row(ids[i], encode(texts[i]));
  return m;
}

PrecomputedEmbeddings::PrecomputedEmbeddings(EmbeddingMatrix table)
    : table_(std::move(table)) {}

PrecomputedEmbeddings PrecomputedEmbeddings::from_file(
    const std::filesystem::path& path) {
  return PrecomputedEmbeddings(read_emb(path));
}

EmbeddingMatrix PrecomputedEmbeddings::embed(
    std::span<const std::string> ids, std::span<const std::string>) const {
  EmbeddingMatrix m(table_.dim());
  for (const auto& id : ids) {
    auto row = table_.find(id);
    if (!row) fail(ErrorCode::kMissingEmbedding, "no embedding for item " + id);
    m.add_row(id, table_.row(*row));
  }
  return m;
}

EmbeddingMatrix embed_documents(std::span<const std::string> ids,
                                std::span<const std::string> texts,
                                const EmbeddingProvider& provider) {
  return provider.embed(ids, texts);
}

// ---------------------------------------------------------------------------
// PCA

namespace {

void fix_signs(Eigen::MatrixXd& comps) {
  // comps: input_dim x k, one component per column.
  for (Eigen::Index c = 0; c < comps.cols(); ++c) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index r = 0; r < comps.rows(); ++r) {
      const double a = std::abs(comps(r, c));
      if (a > best_abs) {
        best_abs = a;
        best = r;
      }
    }
    if (comps(best, c) < 0.0) comps.col(c) *= -1.0;
  }
}

struct CenteredData {
  const EmbeddingMatrix& x;
  const std::vector<std::size_t>& rows;
  const Eigen::VectorXd& mean;

  static constexpr std::size_t kChunk = 2048;

  template <typename Fn>
  void for_each_chunk(Fn&& fn) const {
    const auto d = static_cast<Eigen::Index>(x.dim());
    RowMatrix block;
    for (std::size_t begin = 0; begin < rows.size(); begin += kChunk) {
      const std::size_t end = std::min(rows.size(), begin + kChunk);
      block.resize(static_cast<Eigen::Index>(end - begin), d);
      for (std::size_t i = begin; i < end; ++i) {
        auto src = x.row(rows[i]);
        for (Eigen::Index c = 0; c < d; ++c) {
          block(static_cast<Eigen::Index>(i - begin), c) =
              src[static_cast<std::size_t>(c)] - mean(c);
        }
      }
      fn(block);
    }
  }

  // X_c^T (X_c m) / (n - 1)
  Eigen::MatrixXd cov_times(const Eigen::MatrixXd& m) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), m.cols());
    for_each_chunk([&](const RowMatrix& b) { out.noalias() += b.transpose() * (b * m); });
    return out / static_cast<double>(rows.size() - 1);
  }

  Eigen::MatrixXd covariance() const {
    const auto d = static_cast<Eigen::Index>(x.dim());
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
    for_each_chunk([&](const RowMatrix& b) {
      c.selfadjointView<Eigen::Lower>().rankUpdate(b.transpose());
    });
    Eigen::MatrixXd full = c.selfadjointView<Eigen::Lower>();
    return full / static_cast<double>(rows.size() - 1);
  }
};

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

}  // namespace

PcaModel pca_fit(const EmbeddingMatrix& x, std::size_t k,
                 const PcaOptions& options) {
  if (x.rows() < 2) fail(ErrorCode::kInvalidArgument, "pca_fit needs >= 2 rows");
  const std::size_t d = x.dim();
  std::vector<std::size_t> rows;
  if (x.rows() > options.max_rows && options.max_rows >= 2) {
    Rng rng(options.seed);
    rows = rng.sample_without_replacement(x.rows(), options.max_rows);
    std::sort(rows.begin(), rows.end());
  } else {
    rows.resize(x.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  }
  if (k > std::min(rows.size(), d)) {
    fail(ErrorCode::kInvalidArgument, "pca_fit requires k <= min(rows, dim)");
  }

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t r : rows) {
    auto src = x.row(r);
    for (std::size_t c = 0; c < d; ++c) mean(static_cast<Eigen::Index>(c)) += src[c];
  }
  mean /= static_cast<double>(rows.size());
  const CenteredData data{x, rows, mean};

  const auto kk = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd comps(static_cast<Eigen::Index>(d), kk);
  Eigen::VectorXd var(kk);
  if (d <= options.exact_dim_limit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(data.covariance());
    const auto& vals = es.eigenvalues();
    const auto& vecs = es.eigenvectors();
    const auto dd = static_cast<Eigen::Index>(d);
    for (Eigen::Index i = 0; i < kk; ++i) {
      comps.col(i) = vecs.col(dd - 1 - i);
      var(i) = vals(dd - 1 - i);
    }
  } else {
    // Randomized subspace iteration on the implicit covariance.
    const auto l = static_cast<Eigen::Index>(
        std::min<std::size_t>(d, k + options.oversample));
    Rng rng(derive_seed(options.seed, "pca.randomized"));
    Eigen::MatrixXd omega(static_cast<Eigen::Index>(d), l);
    for (Eigen::Index c = 0; c < l; ++c) {
      for (Eigen::Index r = 0; r < omega.rows(); ++r) omega(r, c) = rng.normal();
    }
    Eigen::MatrixXd q = orthonormal_basis(data.cov_times(omega));
    for (int it = 0; it < options.power_iterations; ++it) {
      q = orthonormal_basis(data.cov_times(q));
    }
    Eigen::MatrixXd small = q.transpose() * data.cov_times(q);
    small = 0.5 * (small + small.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(small);
    for (Eigen::Index i = 0; i < kk; ++i) {
      comps.col(i) = q * es.eigenvectors().col(l - 1 - i);
      var(i) = es.eigenvalues()(l - 1 - i);
    }
  }
  fix_signs(comps);

  PcaModel model;
  model.input_dim = d;
  model.k = k;
  model.mean.assign(mean.data(), mean.data() + mean.size());
  model.components.resize(k * d);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t c = 0; c < d; ++c) {
      model.components[i * d + c] =
          comps(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i));
    }
  }
  model.explained_variance.resize(k);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    const double v = std::max(var(static_cast<Eigen::Index>(i)), 0.0);
    model.explained_variance[i] = std::min(v, prev);
    prev = model.explained_variance[i];
  }
  return model;
}

std::vector<double> pca_transform_row(const PcaModel& model,
                                      std::span<const double> row) {
  if (row.size() != model.input_dim) {
    fail(ErrorCode::kDimensionMismatch, "pca input width mismatch");
  }
  std::vector<double> out(model.k, 0.0);
  for (std::size_t i = 0; i < model.k; ++i) {
    const auto comp = model.component(i);
    double s = 0.0;
    for (std::size_t c = 0; c < model.input_dim; ++c) {
      s += (row[c] - model.mean[c]) * comp[c];
    }
    out[i] = s;
  }
  return out;
}

EmbeddingMatrix pca_transform(const PcaModel& model, const EmbeddingMatrix& x) {
  if (x.dim() != model.input_dim) {
    fail(ErrorCode::kDimensionMismatch,
         "pca expects dim " + std::to_string(model.input_dim) + ", got " +
             std::to_string(x.dim()));
  }
  const auto d = static_cast<Eigen::Index>(model.input_dim);
  const auto kk = static_cast<Eigen::Index>(model.k);
  Eigen::Map<const RowMatrix> p(model.components.data(), kk, d);
  Eigen::Map<const Eigen::RowVectorXd> mu(model.mean.data(), d);
  EmbeddingMatrix out(model.k);
  constexpr std::size_t kChunk = 4096;
  for (std::size_t begin = 0; begin < x.rows(); begin += kChunk) {
    const std::size_t end = std::min(x.rows(), begin + kChunk);
    const auto n = static_cast<Eigen::Index>(end - begin);
    Eigen::Map<const RowMatrix> block(x.data().data() + begin * model.input_dim, n, d);
    RowMatrix y = (block.rowwise() - mu) * p.transpose();
    for (Eigen::Index r = 0; r < n; ++r) {
      out.add_row(x.ids()[begin + static_cast<std::size_t>(r)],
                  std::span<const double>(y.row(r).data(), model.k));
    }
  }
  return out;
}

EmbeddingMatrix pca_inverse_transform(const PcaModel& model,
                                      const EmbeddingMatrix& reduced) {
  if (reduced.dim() != model.k) {
    fail(ErrorCode::kDimensionMismatch, "reduced width mismatch");
  }
  EmbeddingMatrix out(model.input_dim);
  std::vector<double> row(model.input_dim);
  for (std::size_t r = 0; r < reduced.rows(); ++r) {
    auto z = reduced.row(r);
    for (std::size_t c = 0; c < model.input_dim; ++c) row[c] = model.mean[c];
    for (std::size_t i = 0; i < model.k; ++i) {
      auto comp = model.component(i);
      for (std::size_t c = 0; c < model.input_dim; ++c) row[c] += z[i] * comp[c];
    }
    out.add_row(reduced.ids()[r], row);
  }
  return out;
}

void write_pca(const std::filesystem::path& path, const PcaModel& model) {
  nlohmann::json header = {{"format", "f32le"},
                           {"input_dim", model.input_dim},
                           {"k", model.k}};
  const std::string h = header.dump();
  io::AtomicFile f(path, true);
  auto& out = f.stream();
  out.write("PCA1", 4);
  put_u32(out, static_cast<std::uint32_t>(h.size()));
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  for (double v : model.mean) put_f32(out, v);
  for (double v : model.components) put_f32(out, v);
  for (double v : model.explained_variance) put_f32(out, v);
  f.commit();
}

PcaModel read_pca(const std::filesystem::path& path) {
  Reader r(io::read_file(path));
  if (r.take(4) != "PCA1") fail(ErrorCode::kMalformedRecord, "bad PCA1 magic");
  const std::uint32_t hlen = r.u32();
  const auto header = nlohmann::json::parse(r.take(hlen));
  PcaModel m;
  m.input_dim = header.at("input_dim").get<std::size_t>();
  m.k = header.at("k").get<std::size_t>();
  m.mean.resize(m.input_dim);
  for (auto& v : m.mean) v = r.f32();
  m.components.resize(m.k * m.input_dim);
  for (auto& v : m.components) v = r.f32();
  m.explained_variance.resize(m.k);
  for (auto& v : m.explained_variance) v = r.f32();
  return m;
}

std::vector<std::string> post_feature_names(std::size_t reduced_dim) {
  std::vector<std::string> names;
  char buf[32];
  for (std::size_t i = 0; i < reduced_dim; ++i) {
    std::snprintf(buf, sizeof buf, "post_emb_%03zu", i);
    names.emplace_back(buf);
  }
  for (auto k : corpus::kAllKinds) {
    names.push_back("post_kind_" + std::string(corpus::kind_label(k)));
  }
  return names;
}

std::vector<double> aggregate_post_embeddings(
    std::span<const corpus::Tweet> timeline, const EmbeddingMatrix& reduced) {
  const std::size_t d = reduced.dim();
  std::vector<double> out(d + 3, 0.0);
  if (timeline.empty()) {
    std::fill(out.begin(), out.end(), kMissing);
    return out;
  }
  for (const auto& t : timeline) {
    auto idx = reduced.find(t.tweet_id);
    if (!idx) {
      fail(ErrorCode::kMissingEmbedding, "no reduced vector for post " + t.tweet_id);
    }
    auto row = reduced.row(*idx);
    for (std::size_t c = 0; c < d; ++c) out[c] += row[c];
    out[d + static_cast<std::size_t>(t.kind)] += 1.0;
  }
  const double n = static_cast<double>(timeline.size());
  for (double& v : out) v /= n;
  return out;
}

std::vector<double> user_post_features(std::span<const corpus::Tweet> timeline,
                                       const EmbeddingProvider& provider,
                                       const PcaModel& pca) {
  std::vector<double> out(pca.k + 3, kMissing);
  if (timeline.empty()) return out;
  if (provider.dim() != pca.input_dim) {
    fail(ErrorCode::kDimensionMismatch, "provider width differs from the PCA input");
  }
  std::vector<std::string> ids;
  std::vector<std::string> texts;
  for (const auto& t : timeline) {
    ids.push_back(t.tweet_id);
    texts.push_back(t.text);
  }
  const EmbeddingMatrix raw = provider.embed(ids, texts);
  std::vector<double> mean(pca.input_dim, 0.0);
  std::array<double, 3> kinds{0.0, 0.0, 0.0};
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    auto row = raw.row(r);
    for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += row[c];
    kinds[static_cast<std::size_t>(timeline[r].kind)] += 1.0;
  }
  const double n = static_cast<double>(timeline.size());
  for (double& v : mean) v /= n;
  const auto reduced = pca_transform_row(pca, mean);
  std::copy(reduced.begin(), reduced.end(), out.begin());
  for (std::size_t k = 0; k < 3; ++k) out[pca.k + k] = kinds[k] / n;
  return out;
}

}  // namespace susp::embedding

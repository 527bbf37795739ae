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

#ifndef SUSP_TEXT_EMBEDDING_HPP_
#define SUSP_TEXT_EMBEDDING_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "susp/corpus.hpp"
#include "susp/feature_matrix.hpp"

namespace susp::embedding {

// Dense row-per-item vectors. Row i belongs to ids()[i].
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  explicit EmbeddingMatrix(std::size_t dim) : dim_(dim) {}

  // Throws kDimensionMismatch on width mismatch, kInvalidArgument on a
  // duplicate id or non-finite value.
  void add_row(std::string id, std::span<const double> row);

  std::size_t rows() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& ids() const { return ids_; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  const std::vector<double>& data() const { return data_; }
  std::optional<std::size_t> find(std::string_view id) const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

// "EMB1" | u32 count | u32 dim | count*dim f32 | count newline-terminated ids.
// All integers and floats little-endian.
void write_emb(const std::filesystem::path& path, const EmbeddingMatrix& m);
EmbeddingMatrix read_emb(const std::filesystem::path& path);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dim() const = 0;
  // One row per (id, text); ids must be unique.
  virtual EmbeddingMatrix embed(std::span<const std::string> ids,
                                std::span<const std::string> texts) const = 0;
};

// Language-agnostic fallback: case-folded character 3-5-grams hashed into dim
// signed buckets, L2-normalized. Integer hashing only, so outputs are
// identical across runs and platforms.
class HashingEncoder final : public EmbeddingProvider {
 public:
  explicit HashingEncoder(std::size_t dim = 768);

  std::size_t dim() const override { return dim_; }
  EmbeddingMatrix embed(std::span<const std::string> ids,
                        std::span<const std::string> texts) const override;
  std::vector<double> encode(std::string_view text) const;

 private:
  std::size_t dim_;
};

// Looks vectors up by item id; unknown ids raise kMissingEmbedding.
class PrecomputedEmbeddings final : public EmbeddingProvider {
 public:
  explicit PrecomputedEmbeddings(EmbeddingMatrix table);
  static PrecomputedEmbeddings from_file(const std::filesystem::path& path);

  std::size_t dim() const override { return table_.dim(); }
  EmbeddingMatrix embed(std::span<const std::string> ids,
                        std::span<const std::string> texts) const override;

 private:
  EmbeddingMatrix table_;
};

EmbeddingMatrix embed_documents(std::span<const std::string> ids,
                                std::span<const std::string> texts,
                                const EmbeddingProvider& provider);

struct PcaModel {
  std::size_t input_dim = 0;
  std::size_t k = 0;
  std::vector<double> mean;                // input_dim
  std::vector<double> components;          // k x input_dim, row-major
  std::vector<double> explained_variance;  // k, non-increasing

  std::span<const double> component(std::size_t i) const {
    return {components.data() + i * input_dim, input_dim};
  }
};

struct PcaOptions {
  // Rows beyond this are uniformly subsampled before fitting.
  std::size_t max_rows = 200000;
  std::uint64_t seed = 0;
  // Exact covariance eigen-decomposition up to this input width; randomized
  // subspace iteration beyond it.
  std::size_t exact_dim_limit = 1024;
  int power_iterations = 6;
  std::size_t oversample = 10;
};

// Requires 2 <= rows and k <= min(rows, dim). Components follow the sign
// convention that each one's largest-magnitude coordinate is positive.
PcaModel pca_fit(const EmbeddingMatrix& x, std::size_t k,
                 const PcaOptions& options = {});

// (x - mean) * components^T per row. Throws kDimensionMismatch.
EmbeddingMatrix pca_transform(const PcaModel& model, const EmbeddingMatrix& x);
std::vector<double> pca_transform_row(const PcaModel& model,
                                      std::span<const double> row);
EmbeddingMatrix pca_inverse_transform(const PcaModel& model,
                                      const EmbeddingMatrix& reduced);

// "PCA1" | u32 header bytes | JSON header | f32 mean | f32 components |
// f32 explained variance.
void write_pca(const std::filesystem::path& path, const PcaModel& model);
PcaModel read_pca(const std::filesystem::path& path);

// post_emb_000.. followed by post_kind_tweet/retweet/quote.
std::vector<std::string> post_feature_names(std::size_t reduced_dim);

// Mean of the reduced vectors of the timeline's posts, followed by the mean
// one-hot post kind. An empty timeline gives an all-missing row; a post
// without a row in reduced raises kMissingEmbedding.
std::vector<double> aggregate_post_embeddings(
    std::span<const corpus::Tweet> timeline, const EmbeddingMatrix& reduced);

// Equal to aggregate_post_embeddings over the projected posts, computed by
// projecting the mean raw vector instead (the projection is affine).
std::vector<double> user_post_features(std::span<const corpus::Tweet> timeline,
                                       const EmbeddingProvider& provider,
                                       const PcaModel& pca);

}  // namespace susp::embedding

#endif  // SUSP_TEXT_EMBEDDING_HPP_

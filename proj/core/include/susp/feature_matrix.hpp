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

#ifndef SUSP_FEATURE_MATRIX_HPP_
#define SUSP_FEATURE_MATRIX_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "susp/common.hpp"
#include "susp/corpus.hpp"

namespace susp::model {

// Declaration order is the fixed column order used by assemble().
enum class Family : std::uint8_t {
  kProfile,
  kActivity,
  kTextual,
  kPostEmbedding,
  kGraphEmbedding,
};

inline constexpr std::array<Family, 5> kAllFamilies = {
    Family::kProfile, Family::kActivity, Family::kTextual,
    Family::kPostEmbedding, Family::kGraphEmbedding};

std::string_view to_string(Family f);
Family parse_family(std::string_view name);

// Family owning a column name, from the family schemas and the
// post_emb_/post_kind_/graph_emb_ prefixes. Throws kSchemaMismatch.
Family family_of_feature(std::string_view name);

// One user's feature values, addressable by name.
class FeatureRow {
 public:
  FeatureRow(const std::vector<std::string>* names, std::vector<double> values)
      : names_(names), values_(std::move(values)) {}

  const std::vector<std::string>& names() const { return *names_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  std::size_t size() const { return values_.size(); }

  // Throws kSchemaMismatch for unknown names.
  double operator[](std::string_view name) const;

 private:
  const std::vector<std::string>* names_;
  std::vector<double> values_;
};

// Row-per-user numeric matrix. Missing values are NaN; the mask is implied.
struct FeatureMatrix {
  std::vector<std::string> names;
  std::vector<Family> families;  // one per column
  std::vector<std::string> user_ids;
  std::vector<double> values;  // row-major, rows() * cols()
  std::vector<int> labels;     // empty when unlabeled, else one per row

  std::size_t rows() const { return user_ids.size(); }
  std::size_t cols() const { return names.size(); }
  bool labeled() const { return !labels.empty(); }

  double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
  bool missing(std::size_t r, std::size_t c) const { return is_missing(at(r, c)); }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols(), cols()};
  }

  // Throws kSchemaMismatch.
  std::size_t column(std::string_view name) const;

  void add_row(std::string user_id, std::span<const double> row);

  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
  FeatureMatrix select_columns(std::span<const std::size_t> cols) const;
  FeatureMatrix select_families(std::span<const Family> families) const;

  // Throws unless the matrix is rectangular with unique names and binary
  // labels.
  void validate() const;
};

FeatureMatrix make_block(Family family, std::vector<std::string> names);

// Column-wise concatenation in Family order. Every block must cover the same
// user set (rows are aligned to the first block's order); labels are taken
// from whichever block carries them. Throws kUserSetMismatch.
FeatureMatrix assemble(std::vector<FeatureMatrix> blocks);

// Sets labels from the labeled user list; throws kUserSetMismatch when a row
// has no label.
void attach_labels(FeatureMatrix& m, std::span<const corpus::LabeledUser> users);

// CSV: header "user_id,<features...>,label"; missing values are empty cells.
// The label column is omitted for unlabeled matrices.
void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& m);
FeatureMatrix read_feature_csv(const std::filesystem::path& path);

}  // namespace susp::model

#endif  // SUSP_FEATURE_MATRIX_HPP_

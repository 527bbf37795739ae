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

#include "susp/feature_matrix.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "susp/activity_features.hpp"
#include "susp/io.hpp"
#include "susp/profile_features.hpp"
#include "susp/textual_features.hpp"

namespace susp::model {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::kProfile: return "profile";
    case Family::kActivity: return "activity";
    case Family::kTextual: return "textual";
    case Family::kPostEmbedding: return "post_embedding";
    case Family::kGraphEmbedding: return "graph_embedding";
  }
  return "profile";
}

Family parse_family(std::string_view name) {
  for (Family f : kAllFamilies) {
    if (to_string(f) == name) return f;
  }
  fail(ErrorCode::kInvalidArgument, "unknown feature family '" +
                                        std::string(name) + "'");
}

Family family_of_feature(std::string_view name) {
  static const auto* lookup = [] {
    auto* m = new std::unordered_map<std::string, Family>();
    for (const auto& n : profile::feature_names()) m->emplace(n, Family::kProfile);
    for (const auto& n : activity::feature_names()) m->emplace(n, Family::kActivity);
    for (const auto& n : textual::feature_names()) m->emplace(n, Family::kTextual);
    return m;
  }();
  if (auto it = lookup->find(std::string(name)); it != lookup->end()) {
    return it->second;
  }
  if (name.starts_with("post_emb_") || name.starts_with("post_kind_")) {
    return Family::kPostEmbedding;
  }
  if (name.starts_with("graph_emb_")) return Family::kGraphEmbedding;
  fail(ErrorCode::kSchemaMismatch,
       "feature '" + std::string(name) + "' belongs to no family");
}

double FeatureRow::operator[](std::string_view name) const {
  const auto& n = *names_;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] == name) return values_[i];
  }
  fail(ErrorCode::kSchemaMismatch, "no feature named '" + std::string(name) + "'");
}

std::size_t FeatureMatrix::column(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  fail(ErrorCode::kSchemaMismatch, "no column named '" + std::string(name) + "'");
}

void FeatureMatrix::add_row(std::string user_id, std::span<const double> row) {
  if (row.size() != cols()) {
    fail(ErrorCode::kSchemaMismatch, "row width does not match schema");
  }
  user_ids.push_back(std::move(user_id));
  values.insert(values.end(), row.begin(), row.end());
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  FeatureMatrix out;
  out.names = names;
  out.families = families;
  out.values.reserve(rows.size() * cols());
  for (std::size_t r : rows) {
    out.user_ids.push_back(user_ids[r]);
    auto src = row(r);
    out.values.insert(out.values.end(), src.begin(), src.end());
    if (labeled()) out.labels.push_back(labels[r]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_columns(
    std::span<const std::size_t> cols_idx) const {
  FeatureMatrix out;
  for (std::size_t c : cols_idx) {
    out.names.push_back(names[c]);
    out.families.push_back(families[c]);
  }
  out.user_ids = user_ids;
  out.labels = labels;
  out.values.reserve(rows() * cols_idx.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c : cols_idx) out.values.push_back(at(r, c));
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_families(
    std::span<const Family> wanted) const {
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < cols(); ++c) {
    if (std::find(wanted.begin(), wanted.end(), families[c]) != wanted.end()) {
      keep.push_back(c);
    }
  }
  return select_columns(keep);
}

void FeatureMatrix::validate() const {
  if (families.size() != names.size()) {
    fail(ErrorCode::kSchemaMismatch, "family tags do not match columns");
  }
  if (values.size() != rows() * cols()) {
    fail(ErrorCode::kSchemaMismatch, "matrix is not rectangular");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) {
      fail(ErrorCode::kSchemaMismatch, "duplicate feature name '" + n + "'");
    }
  }
  if (labeled()) {
    if (labels.size() != rows()) {
      fail(ErrorCode::kSchemaMismatch, "label count does not match rows");
    }
    for (int l : labels) {
      if (l != 0 && l != 1) fail(ErrorCode::kSchemaMismatch, "labels must be 0/1");
    }
  }
}

FeatureMatrix make_block(Family family, std::vector<std::string> names) {
  FeatureMatrix m;
  m.families.assign(names.size(), family);
  m.names = std::move(names);
  return m;
}

FeatureMatrix assemble(std::vector<FeatureMatrix> blocks) {
  if (blocks.empty()) {
    fail(ErrorCode::kInvalidArgument, "assemble needs at least one block");
  }
  std::stable_sort(blocks.begin(), blocks.end(),
                   [](const FeatureMatrix& a, const FeatureMatrix& b) {
                     const auto fa = a.families.empty() ? Family::kProfile
                                                        : a.families.front();
                     const auto fb = b.families.empty() ? Family::kProfile
                                                        : b.families.front();
                     return fa < fb;
                   });
  FeatureMatrix out;
  out.user_ids = blocks.front().user_ids;
  const std::set<std::string> reference(out.user_ids.begin(),
                                        out.user_ids.end());
  if (reference.size() != out.user_ids.size()) {
    fail(ErrorCode::kUserSetMismatch, "duplicate user rows in block");
  }
  std::vector<std::vector<std::size_t>> row_maps;
  for (const auto& b : blocks) {
    b.validate();
    if (b.rows() != out.rows() ||
        std::set<std::string>(b.user_ids.begin(), b.user_ids.end()) !=
            reference) {
      fail(ErrorCode::kUserSetMismatch,
           "feature families cover different user sets");
    }
    std::unordered_map<std::string_view, std::size_t> pos;
    for (std::size_t r = 0; r < b.rows(); ++r) pos.emplace(b.user_ids[r], r);
    std::vector<std::size_t> map(out.rows());
    for (std::size_t r = 0; r < out.rows(); ++r) map[r] = pos.at(out.user_ids[r]);
    row_maps.push_back(std::move(map));
    out.names.insert(out.names.end(), b.names.begin(), b.names.end());
    out.families.insert(out.families.end(), b.families.begin(), b.families.end());
    if (b.labeled() && !out.labeled()) {
      out.labels.resize(out.rows());
      for (std::size_t r = 0; r < out.rows(); ++r) {
        out.labels[r] = b.labels[row_maps.back()[r]];
      }
    }
  }
  out.values.reserve(out.rows() * out.cols());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      auto src = blocks[bi].row(row_maps[bi][r]);
      out.values.insert(out.values.end(), src.begin(), src.end());
    }
  }
  out.validate();
  return out;
}

void attach_labels(FeatureMatrix& m, std::span<const corpus::LabeledUser> users) {
  std::unordered_map<std::string_view, int> by_id;
  for (const auto& u : users) by_id.emplace(u.user_id, u.label);
  m.labels.assign(m.rows(), 0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto it = by_id.find(m.user_ids[r]);
    if (it == by_id.end()) {
      fail(ErrorCode::kUserSetMismatch, "no label for user " + m.user_ids[r]);
    }
    m.labels[r] = it->second;
  }
}

void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& m) {
  m.validate();
  io::AtomicFile f(path);
  auto& out = f.stream();
  out << "user_id";
  for (const auto& n : m.names) out << ',' << io::csv_escape(n);
  if (m.labeled()) out << ",label";
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << io::csv_escape(m.user_ids[r]);
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out << ',' << io::format_double(m.at(r, c));
    }
    if (m.labeled()) out << ',' << m.labels[r];
    out << '\n';
  }
  f.commit();
}

FeatureMatrix read_feature_csv(const std::filesystem::path& path) {
  FeatureMatrix m;
  bool header = true;
  bool has_label = false;
  io::for_each_line(path, [&](std::string_view line) {
    if (line.empty()) return;
    auto fields = io::split_csv_line(line);
    if (header) {
      if (fields.empty() || fields.front() != "user_id") {
        fail(ErrorCode::kMalformedRecord, "feature CSV must start with user_id");
      }
      has_label = fields.size() > 1 && fields.back() == "label";
      const std::size_t end = fields.size() - (has_label ? 1 : 0);
      for (std::size_t i = 1; i < end; ++i) {
        m.families.push_back(family_of_feature(fields[i]));
        m.names.push_back(std::move(fields[i]));
      }
      header = false;
      return;
    }
    if (fields.size() != m.cols() + 1 + (has_label ? 1 : 0)) {
      fail(ErrorCode::kMalformedRecord, "feature CSV row has wrong width");
    }
    m.user_ids.push_back(fields[0]);
    for (std::size_t c = 0; c < m.cols(); ++c) {
      m.values.push_back(io::parse_double_cell(fields[c + 1]));
    }
    if (has_label) m.labels.push_back(std::stoi(fields.back()));
  });
  m.validate();
  return m;
}

}  // namespace susp::model

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

#include "susp/model.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "gbdt_internal.hpp"
#include "susp/io.hpp"
#include "susp/parallel.hpp"
#include "susp/random.hpp"

namespace susp::model {

std::string_view to_string(ModelKind k) {
  return k == ModelKind::kGbdt ? "gbdt" : "logistic";
}

ModelKind parse_model_kind(std::string_view s) {
  if (s == "gbdt") return ModelKind::kGbdt;
  if (s == "logistic") return ModelKind::kLogistic;
  fail(ErrorCode::kInvalidArgument, "unknown model kind: " + std::string(s));
}

std::string_view to_string(SplitTag t) {
  switch (t) {
    case SplitTag::kValidation: return "validation";
    case SplitTag::kTest: return "test";
    case SplitTag::kSecondTest: return "second_test";
  }
  return "validation";
}

SplitTag parse_split_tag(std::string_view s) {
  if (s == "validation") return SplitTag::kValidation;
  if (s == "test") return SplitTag::kTest;
  if (s == "second_test") return SplitTag::kSecondTest;
  fail(ErrorCode::kInvalidArgument, "unknown split: " + std::string(s));
}

double Tree::predict(std::span<const double> x) const {
  std::size_t n = 0;
  while (feature[n] >= 0) {
    n = static_cast<std::size_t>(x[static_cast<std::size_t>(feature[n])] <= threshold[n]
                                     ? left[n]
                                     : right[n]);
  }
  return value[n];
}

double TrainedModel::margin(std::span<const double> row) const {
  if (row.size() != schema.size()) {
    fail(ErrorCode::kSchemaMismatch, "row width differs from model schema");
  }
  const bool any_missing =
      std::any_of(row.begin(), row.end(), [](double v) { return is_missing(v); });
  std::vector<double> filled;
  if (any_missing) {
    filled.assign(row.begin(), row.end());
    for (std::size_t j = 0; j < filled.size(); ++j) {
      if (is_missing(filled[j])) filled[j] = medians[j];
    }
    row = filled;
  }
  if (kind == ModelKind::kGbdt) {
    double f = base_score;
    for (const auto& t : trees) f += t.predict(row);
    return f;
  }
  double f = bias;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (scale[j] > 0.0) f += weights[j] * (row[j] - center[j]) / scale[j];
  }
  return f;
}

double TrainedModel::proba(std::span<const double> row) const {
  return 1.0 / (1.0 + std::exp(-margin(row)));
}

namespace {

std::vector<double> column_medians(const FeatureMatrix& x) {
  std::vector<double> med(x.cols(), 0.0);
  std::vector<double> col;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    col.clear();
    for (std::size_t r = 0; r < x.rows(); ++r) {
      if (!x.missing(r, c)) col.push_back(x.at(r, c));
    }
    if (col.empty()) continue;
    std::sort(col.begin(), col.end());
    const std::size_t k = col.size();
    med[c] = k % 2 == 1 ? col[k / 2] : 0.5 * (col[k / 2 - 1] + col[k / 2]);
  }
  return med;
}

std::vector<double> imputed(const FeatureMatrix& x, const std::vector<double>& med) {
  std::vector<double> v = x.values;
  const std::size_t m = x.cols();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (is_missing(v[i])) v[i] = med[i % m];
  }
  return v;
}

void check_labels(const FeatureMatrix& x) {
  if (!x.labeled()) fail(ErrorCode::kDegenerateLabels, "training matrix is unlabeled");
  const auto pos = std::count(x.labels.begin(), x.labels.end(), 1);
  if (pos == 0 || pos == static_cast<std::ptrdiff_t>(x.labels.size())) {
    fail(ErrorCode::kDegenerateLabels, "training labels contain a single class");
  }
}

}  // namespace

TrainedModel train(const FeatureMatrix& x, ModelKind kind, const Hyperparams& params,
                   std::uint64_t seed) {
  check_labels(x);
  if (x.cols() == 0) fail(ErrorCode::kInvalidArgument, "training matrix has no columns");
  TrainedModel m;
  m.kind = kind;
  m.schema = x.names;
  m.families = x.families;
  m.source_names = x.names;
  m.selection_mask.assign(x.cols(), true);
  m.medians = column_medians(x);
  m.gbdt = params.gbdt;
  m.logistic = params.logistic;
  m.seed = seed;
  const auto data = imputed(x, m.medians);
  if (kind == ModelKind::kGbdt) {
    detail::fit_gbdt(data, x.rows(), x.cols(), x.labels, params.gbdt, params.threads, m);
  } else {
    detail::fit_logistic(data, x.rows(), x.cols(), x.labels, params.logistic, m);
  }
  return m;
}

std::vector<bool> select_features(const FeatureMatrix& x, double threshold,
                                  const Hyperparams& params, std::uint64_t seed) {
  const TrainedModel pre = train(x, ModelKind::kGbdt, params, seed);
  const auto data = imputed(x, pre.medians);
  const std::size_t m = x.cols();
  std::vector<bool> mask(m, false);
  for (std::size_t c = 0; c < m; ++c) {
    bool constant = true;
    for (std::size_t r = 1; r < x.rows() && constant; ++r) {
      constant = data[r * m + c] == data[c];
    }
    mask[c] = !constant && pre.importance[c] >= threshold;
  }
  return mask;
}

TrainedModel fit_with_selection(const FeatureMatrix& x, ModelKind kind,
                                const Hyperparams& params, double threshold,
                                std::uint64_t seed) {
  auto mask = select_features(x, threshold, params, seed);
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < mask.size(); ++c) {
    if (mask[c]) keep.push_back(c);
  }
  if (keep.empty()) {
    fail(ErrorCode::kDegenerateLabels, "feature selection kept no columns");
  }
  TrainedModel m = train(x.select_columns(keep), kind, params, seed);
  m.source_names = x.names;
  m.selection_mask = std::move(mask);
  return m;
}

FeatureMatrix project(const TrainedModel& m, const FeatureMatrix& x) {
  if (x.names == m.schema) return x;
  if (x.names == m.source_names) {
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < m.selection_mask.size(); ++c) {
      if (m.selection_mask[c]) keep.push_back(c);
    }
    return x.select_columns(keep);
  }
  // Otherwise pick the schema columns by name, provided the source order
  // is respected.
  std::vector<std::size_t> keep;
  keep.reserve(m.schema.size());
  for (const auto& name : m.schema) {
    const auto it = std::find(x.names.begin(), x.names.end(), name);
    if (it == x.names.end()) {
      fail(ErrorCode::kSchemaMismatch, "input lacks model column " + name);
    }
    keep.push_back(static_cast<std::size_t>(it - x.names.begin()));
  }
  if (!std::is_sorted(keep.begin(), keep.end())) {
    fail(ErrorCode::kSchemaMismatch, "input columns are ordered differently from the model");
  }
  return x.select_columns(keep);
}

std::vector<double> predict_proba(const TrainedModel& m, const FeatureMatrix& x) {
  const FeatureMatrix p = project(m, x);
  std::vector<double> out(p.rows());
  for (std::size_t r = 0; r < p.rows(); ++r) out[r] = m.proba(p.row(r));
  return out;
}

EvalReport evaluate_scores(std::span<const double> scores, std::span<const int> labels,
                           SplitTag split) {
  if (scores.size() != labels.size()) {
    fail(ErrorCode::kInvalidArgument, "scores and labels differ in length");
  }
  EvalReport r;
  r.split = split;
  r.samples = scores.size();
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool pred = scores[i] >= 0.5;
    const bool pos = labels[i] == 1;
    r.positives += pos;
    tp += pred && pos;
    fp += pred && !pos;
    fn += !pred && pos;
    tn += !pred && !pos;
  }
  const double n = static_cast<double>(scores.size());
  r.accuracy = n > 0 ? static_cast<double>(tp + tn) / n : 0.0;
  r.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  r.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  r.f1 = 2 * tp + fp + fn > 0
             ? 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn)
             : 0.0;

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  const std::size_t npos = r.positives;
  const std::size_t nneg = scores.size() - npos;

  // Mann-Whitney with midranks (ranks ascending by score).
  if (npos > 0 && nneg > 0) {
    double rank_sum = 0.0;
    std::size_t i = 0;
    const std::size_t total = order.size();
    while (i < total) {
      std::size_t j = i;
      std::size_t pos_in_group = 0;
      while (j < total && scores[order[j]] == scores[order[i]]) {
        pos_in_group += labels[order[j]] == 1;
        ++j;
      }
      // Descending positions [i, j) hold ascending ranks total-j+1 .. total-i.
      const double mid = (static_cast<double>(total - j + 1) + static_cast<double>(total - i)) / 2.0;
      rank_sum += mid * static_cast<double>(pos_in_group);
      i = j;
    }
    const double np = static_cast<double>(npos);
    r.roc_auc = (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(nneg));
  }

  std::size_t ctp = 0, cfp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double t = scores[order[i]];
    while (i < order.size() && scores[order[i]] == t) {
      (labels[order[i]] == 1 ? ctp : cfp) += 1;
      ++i;
    }
    const double tpr = npos > 0 ? static_cast<double>(ctp) / static_cast<double>(npos) : 0.0;
    const double fpr = nneg > 0 ? static_cast<double>(cfp) / static_cast<double>(nneg) : 0.0;
    const double prec = static_cast<double>(ctp) / static_cast<double>(ctp + cfp);
    r.roc.push_back({t, fpr, tpr});
    r.pr.push_back({t, tpr, prec});
  }
  return r;
}

EvalReport evaluate(const TrainedModel& m, const FeatureMatrix& x, SplitTag split) {
  if (!x.labeled()) fail(ErrorCode::kInvalidArgument, "evaluation matrix is unlabeled");
  const auto scores = predict_proba(m, x);
  return evaluate_scores(scores, x.labels, split);
}

std::vector<int> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 2) fail(ErrorCode::kTooFewSamples, "k-fold needs k >= 2");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] == 1].push_back(i);
  for (const auto& c : by_class) {
    if (c.size() < static_cast<std::size_t>(k)) {
      fail(ErrorCode::kTooFewSamples, "each class needs at least k rows for stratified folds");
    }
  }
  std::vector<int> fold(labels.size(), 0);
  std::size_t offset = 0;
  for (int c = 0; c < 2; ++c) {
    auto idx = by_class[c];
    Rng rng(derive_seed(seed, c == 0 ? "folds.negative" : "folds.positive"));
    rng.shuffle(idx);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      fold[idx[j]] = static_cast<int>((offset + j) % static_cast<std::size_t>(k));
    }
    offset += idx.size();
  }
  return fold;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    std::span<const int> labels, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "test_fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> train, test;
  for (int c = 0; c < 2; ++c) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if ((labels[i] == 1) == (c == 1)) idx.push_back(i);
    }
    Rng rng(derive_seed(seed, c == 0 ? "split.negative" : "split.positive"));
    rng.shuffle(idx);
    const auto k = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(idx.size())));
    test.insert(test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
    train.insert(train.end(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

CvResult kfold_cv(const FeatureMatrix& x, ModelKind kind, const Hyperparams& params,
                  int k, std::uint64_t seed, int threads) {
  if (!x.labeled()) fail(ErrorCode::kDegenerateLabels, "cross-validation needs labels");
  const auto fold = stratified_folds(x.labels, k, seed);
  CvResult out;
  out.folds.resize(static_cast<std::size_t>(k));
  out.out_of_fold.assign(x.rows(), 0.0);
  Hyperparams inner = params;
  if (threads > 1) inner.threads = 1;
  parallel_for(static_cast<std::size_t>(k), threads, [&](std::size_t f) {
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      (fold[i] == static_cast<int>(f) ? te : tr).push_back(i);
    }
    const TrainedModel m = train(x.select_rows(tr), kind, inner, derive_seed(seed, f));
    const FeatureMatrix test = x.select_rows(te);
    const auto scores = predict_proba(m, test);
    for (std::size_t j = 0; j < te.size(); ++j) out.out_of_fold[te[j]] = scores[j];
    out.folds[f] = evaluate_scores(scores, test.labels, SplitTag::kValidation);
  });
  out.mean = evaluate_scores(out.out_of_fold, x.labels, SplitTag::kValidation);
  const double kk = static_cast<double>(k);
  out.mean.f1 = out.mean.roc_auc = out.mean.accuracy = out.mean.precision = out.mean.recall = 0.0;
  for (const auto& r : out.folds) {
    out.mean.f1 += r.f1 / kk;
    out.mean.roc_auc += r.roc_auc / kk;
    out.mean.accuracy += r.accuracy / kk;
    out.mean.precision += r.precision / kk;
    out.mean.recall += r.recall / kk;
  }
  return out;
}

ProtocolResult second_window_protocol(const FeatureMatrix& window1,
                                      const FeatureMatrix& window2,
                                      const ProtocolOptions& options) {
  if (!window1.labeled() || !window2.labeled()) {
    fail(ErrorCode::kDegenerateLabels, "both windows must be labeled");
  }
  ProtocolResult out;
  auto [tr, te] = stratified_split(window1.labels, options.test_fraction,
                                   derive_seed(options.seed, "protocol.split"));
  out.split_model = fit_with_selection(window1.select_rows(tr), options.kind, options.params,
                                       options.selection_threshold, options.seed);
  out.test = evaluate(out.split_model, window1.select_rows(te), SplitTag::kTest);
  out.full_model = fit_with_selection(window1, options.kind, options.params,
                                      options.selection_threshold, options.seed);
  out.second_test = evaluate(out.full_model, window2, SplitTag::kSecondTest);
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {
constexpr int kModelFormatVersion = 1;
}

std::string model_to_json(const TrainedModel& m) {
  nlohmann::json j;
  j["format"] = "susp-model";
  j["version"] = kModelFormatVersion;
  j["kind"] = to_string(m.kind);
  j["seed"] = m.seed;
  j["schema"] = m.schema;
  std::vector<std::string> fam;
  for (auto f : m.families) fam.emplace_back(to_string(f));
  j["families"] = fam;
  j["medians"] = m.medians;
  j["source_names"] = m.source_names;
  std::vector<int> mask(m.selection_mask.begin(), m.selection_mask.end());
  j["selection_mask"] = mask;
  if (m.kind == ModelKind::kGbdt) {
    j["params"] = {{"rounds", m.gbdt.rounds},
                   {"max_depth", m.gbdt.max_depth},
                   {"learning_rate", m.gbdt.learning_rate},
                   {"lambda", m.gbdt.lambda},
                   {"min_child_weight", m.gbdt.min_child_weight},
                   {"max_bins", m.gbdt.max_bins}};
    j["base_score"] = m.base_score;
    j["importance"] = m.importance;
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : m.trees) {
      trees.push_back({{"feature", t.feature},
                       {"threshold", t.threshold},
                       {"left", t.left},
                       {"right", t.right},
                       {"value", t.value}});
    }
    j["trees"] = std::move(trees);
  } else {
    j["params"] = {{"l2", m.logistic.l2},
                   {"max_iter", m.logistic.max_iter},
                   {"tol", m.logistic.tol}};
    j["bias"] = m.bias;
    j["weights"] = m.weights;
    j["center"] = m.center;
    j["scale"] = m.scale;
  }
  return j.dump();
}

TrainedModel model_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kMalformedRecord, std::string("model JSON: ") + e.what());
  }
  try {
    if (j.at("format") != "susp-model") fail(ErrorCode::kMalformedRecord, "not a model file");
    if (j.at("version").get<int>() != kModelFormatVersion) {
      fail(ErrorCode::kSchemaMismatch, "unsupported model version");
    }
    TrainedModel m;
    m.kind = parse_model_kind(j.at("kind").get<std::string>());
    m.seed = j.at("seed").get<std::uint64_t>();
    m.schema = j.at("schema").get<std::vector<std::string>>();
    for (const auto& f : j.at("families")) m.families.push_back(parse_family(f.get<std::string>()));
    m.medians = j.at("medians").get<std::vector<double>>();
    m.source_names = j.at("source_names").get<std::vector<std::string>>();
    for (int v : j.at("selection_mask").get<std::vector<int>>()) m.selection_mask.push_back(v != 0);
    const auto& p = j.at("params");
    if (m.kind == ModelKind::kGbdt) {
      m.gbdt.rounds = p.at("rounds");
      m.gbdt.max_depth = p.at("max_depth");
      m.gbdt.learning_rate = p.at("learning_rate");
      m.gbdt.lambda = p.at("lambda");
      m.gbdt.min_child_weight = p.at("min_child_weight");
      m.gbdt.max_bins = p.at("max_bins");
      m.base_score = j.at("base_score");
      m.importance = j.at("importance").get<std::vector<double>>();
      for (const auto& t : j.at("trees")) {
        Tree tree;
        tree.feature = t.at("feature").get<std::vector<int>>();
        tree.threshold = t.at("threshold").get<std::vector<double>>();
        tree.left = t.at("left").get<std::vector<int>>();
        tree.right = t.at("right").get<std::vector<int>>();
        tree.value = t.at("value").get<std::vector<double>>();
        const std::size_t n = tree.feature.size();
        if (n == 0 || tree.threshold.size() != n || tree.left.size() != n ||
            tree.right.size() != n || tree.value.size() != n) {
          fail(ErrorCode::kMalformedRecord, "tree arrays differ in length");
        }
        for (std::size_t k = 0; k < n; ++k) {
          if (tree.feature[k] < 0) continue;
          const auto bad = [&](int c) { return c <= static_cast<int>(k) || c >= static_cast<int>(n); };
          if (tree.feature[k] >= static_cast<int>(m.schema.size()) || bad(tree.left[k]) ||
              bad(tree.right[k])) {
            fail(ErrorCode::kMalformedRecord, "tree node out of range");
          }
        }
        m.trees.push_back(std::move(tree));
      }
    } else {
      m.logistic.l2 = p.at("l2");
      m.logistic.max_iter = p.at("max_iter");
      m.logistic.tol = p.at("tol");
      m.bias = j.at("bias");
      m.weights = j.at("weights").get<std::vector<double>>();
      m.center = j.at("center").get<std::vector<double>>();
      m.scale = j.at("scale").get<std::vector<double>>();
      if (m.weights.size() != m.schema.size() || m.center.size() != m.schema.size() ||
          m.scale.size() != m.schema.size()) {
        fail(ErrorCode::kMalformedRecord, "logistic arrays differ from schema");
      }
    }
    const auto selected = static_cast<std::size_t>(
        std::count(m.selection_mask.begin(), m.selection_mask.end(), true));
    if (m.medians.size() != m.schema.size() || m.families.size() != m.schema.size() ||
        m.selection_mask.size() != m.source_names.size() || selected != m.schema.size()) {
      fail(ErrorCode::kMalformedRecord, "model schema arrays are inconsistent");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kMalformedRecord, std::string("model JSON: ") + e.what());
  }
}

void write_model(const std::filesystem::path& path, const TrainedModel& m) {
  io::write_file_atomic(path, model_to_json(m) + "\n");
}

TrainedModel read_model(const std::filesystem::path& path) {
  return model_from_json(io::read_file(path));
}

void write_curve_csv(const std::filesystem::path& path, std::span<const CurvePoint> curve) {
  io::AtomicFile f(path);
  f.stream() << "threshold,x,y\n";
  for (const auto& p : curve) {
    f.stream() << io::format_double(p.threshold) << ',' << io::format_double(p.x) << ','
               << io::format_double(p.y) << '\n';
  }
  f.commit();
}

}  // namespace susp::model

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

#ifndef SUSP_MODEL_HPP_
#define SUSP_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "susp/feature_matrix.hpp"

namespace susp::model {

enum class ModelKind : std::uint8_t { kGbdt, kLogistic };

std::string_view to_string(ModelKind k);
ModelKind parse_model_kind(std::string_view s);

struct GbdtParams {
  int rounds = 200;
  int max_depth = 6;
  double learning_rate = 0.1;
  double lambda = 1.0;
  double min_child_weight = 1.0;
  int max_bins = 64;
};

struct LogisticParams {
  double l2 = 1.0;
  int max_iter = 50;
  double tol = 1e-9;
};

struct Hyperparams {
  GbdtParams gbdt;
  LogisticParams logistic;
  // Histogram construction is split across features.
  int threads = 1;
};

// Binary split tree. Internal nodes send x[feature] <= threshold left;
// leaves have feature == -1.
struct Tree {
  std::vector<int> feature;
  std::vector<double> threshold;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<double> value;

  std::size_t size() const { return feature.size(); }
  double predict(std::span<const double> x) const;
};

struct TrainedModel {
  ModelKind kind = ModelKind::kGbdt;
  std::vector<std::string> schema;  // selected columns, in order
  std::vector<Family> families;     // one per schema column
  std::vector<double> medians;      // imputation constants, per schema column
  // Columns the selection ran over and which survived. selected count ==
  // schema.size().
  std::vector<std::string> source_names;
  std::vector<bool> selection_mask;

  // Boosted trees.
  double base_score = 0.0;
  std::vector<Tree> trees;
  std::vector<double> importance;  // total gain share per schema column

  // Logistic regression on standardized inputs.
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> center;
  std::vector<double> scale;

  GbdtParams gbdt;
  LogisticParams logistic;
  std::uint64_t seed = 0;
  std::vector<double> training_loss;  // per round / iteration; not serialized

  // Log-odds of the suspended class for a row in schema order. Missing
  // values are imputed.
  double margin(std::span<const double> row) const;
  double proba(std::span<const double> row) const;
};

// Throws kDegenerateLabels when a class is absent.
TrainedModel train(const FeatureMatrix& x, ModelKind kind, const Hyperparams& params,
                   std::uint64_t seed);

// Fits preliminary boosted trees and keeps every non-constant column whose
// gain share is >= threshold. Deterministic.
std::vector<bool> select_features(const FeatureMatrix& x, double threshold,
                                  const Hyperparams& params, std::uint64_t seed);

// select_features, then train on the survivors; the mask is recorded.
TrainedModel fit_with_selection(const FeatureMatrix& x, ModelKind kind,
                                const Hyperparams& params, double threshold,
                                std::uint64_t seed);

// Accepts columns equal to the model schema or to its selection source.
// Throws kSchemaMismatch otherwise.
std::vector<double> predict_proba(const TrainedModel& m, const FeatureMatrix& x);
// Same inputs, projected onto the schema.
FeatureMatrix project(const TrainedModel& m, const FeatureMatrix& x);

enum class SplitTag : std::uint8_t { kValidation, kTest, kSecondTest };

std::string_view to_string(SplitTag t);
SplitTag parse_split_tag(std::string_view s);

struct CurvePoint {
  double threshold = 0.0;
  double x = 0.0;
  double y = 0.0;
};

struct EvalReport {
  SplitTag split = SplitTag::kValidation;
  std::size_t samples = 0;
  std::size_t positives = 0;
  double f1 = 0.0;
  double roc_auc = 0.5;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::vector<CurvePoint> roc;  // x = FPR, y = TPR; thresholds descending
  std::vector<CurvePoint> pr;   // x = recall, y = precision
};

// Threshold 0.5 (score >= 0.5 is positive) for F1/accuracy. ROC-AUC is the
// Mann-Whitney statistic with ties counted one half; 0.5 when a class is
// absent. Curves have one point per distinct score.
EvalReport evaluate_scores(std::span<const double> scores, std::span<const int> labels,
                           SplitTag split);
EvalReport evaluate(const TrainedModel& m, const FeatureMatrix& x, SplitTag split);

// Fold id per row. Each class is dealt round-robin over shuffled positions.
// Throws kTooFewSamples when k < 2 or a class has fewer than k rows.
std::vector<int> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed);

// Per-class uniform hold-out of round(fraction * class size) rows. Returns
// sorted (train, test) row indices.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    std::span<const int> labels, double test_fraction, std::uint64_t seed);

struct CvResult {
  std::vector<EvalReport> folds;
  EvalReport mean;  // metric means; curves from pooled out-of-fold scores
  std::vector<double> out_of_fold;
};

// Folds are trained in parallel when threads > 1.
CvResult kfold_cv(const FeatureMatrix& x, ModelKind kind, const Hyperparams& params,
                  int k, std::uint64_t seed, int threads = 1);

struct ProtocolOptions {
  ModelKind kind = ModelKind::kGbdt;
  Hyperparams params;
  double selection_threshold = 0.001;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct ProtocolResult {
  TrainedModel split_model;  // trained on the window-1 training portion
  TrainedModel full_model;   // trained on all of window 1
  EvalReport test;           // split_model on the window-1 held-out portion
  EvalReport second_test;    // full_model on window 2
};

// window2 is projected onto the window-1 schema.
ProtocolResult second_window_protocol(const FeatureMatrix& window1,
                                      const FeatureMatrix& window2,
                                      const ProtocolOptions& options);

std::string model_to_json(const TrainedModel& m);
TrainedModel model_from_json(std::string_view json);
void write_model(const std::filesystem::path& path, const TrainedModel& m);
TrainedModel read_model(const std::filesystem::path& path);

// CSV threshold,x,y
void write_curve_csv(const std::filesystem::path& path, std::span<const CurvePoint> curve);

}  // namespace susp::model

#endif  // SUSP_MODEL_HPP_

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

#ifndef SUSP_EXPLAIN_HPP_
#define SUSP_EXPLAIN_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "susp/feature_matrix.hpp"
#include "susp/model.hpp"

namespace susp::explain {

using ModelFn = std::function<double(std::span<const double>)>;

// Row-major reference rows in the explained model's schema.
struct Background {
  std::size_t cols = 0;
  std::vector<double> values;

  std::size_t rows() const { return cols == 0 ? 0 : values.size() / cols; }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols, cols};
  }
  void add_row(std::span<const double> row);
};

struct Explanation {
  std::string id;
  std::shared_ptr<const std::vector<std::string>> features;
  std::vector<double> values;  // the explained instance
  std::vector<double> phi;
  double base_value = 0.0;  // mean model output over the background
  double output = 0.0;      // model output on the instance
};

inline constexpr std::size_t kMaxExactFeatures = 15;

// Enumerates all 2^m coalitions; v(S) averages the model over background
// rows with the features in S taken from the instance. Throws
// kTooManyFeatures for m > 15 and kInvalidArgument for an empty background.
Explanation shapley_exact(const ModelFn& f, std::span<const double> instance,
                          const Background& background);

// Antithetic permutation sampling, each permutation paired with one
// uniformly drawn background row. The efficiency residual is spread in
// proportion to |phi|. Deterministic given seed.
Explanation shapley_sampled(const ModelFn& f, std::span<const double> instance,
                            const Background& background, std::size_t samples,
                            std::uint64_t seed);

struct FeatureImpact {
  std::string feature;
  double mean_abs_phi = 0.0;
  std::size_t rank = 0;  // 1 = largest impact
};

struct ImpactSummary {
  std::vector<std::string> features;  // schema order
  std::vector<double> mean_abs_phi;   // schema order
  std::vector<FeatureImpact> ranking; // mean |phi| descending, ties by name
  // Per feature (schema order): (value, phi) for each explanation.
  std::vector<std::vector<std::pair<double, double>>> scatter;
};

// Throws kSchemaMismatch for differing feature lists and kInvalidArgument for
// no explanations.
ImpactSummary impact_summary(std::span<const Explanation> explanations);

// The model's log-odds output over rows in its schema.
ModelFn margin_function(const model::TrainedModel& m);

// Up to n rows sampled without replacement, projected onto the model schema.
Background sample_background(const model::TrainedModel& m, const model::FeatureMatrix& x,
                             std::size_t n, std::uint64_t seed);

struct ExplainOptions {
  std::size_t background_rows = 100;
  std::size_t samples = 64;  // permutations per instance in sampled mode
  bool force_sampled = false;
  std::uint64_t seed = 0;
  int threads = 1;
};

// Explains every row of x (projected onto the schema): exact when the schema
// has at most 15 columns, sampled otherwise.
std::vector<Explanation> explain_matrix(const model::TrainedModel& m,
                                        const model::FeatureMatrix& x,
                                        const model::FeatureMatrix& background_source,
                                        const ExplainOptions& options);

// CSV user_id,feature,value,phi
void write_explanations_csv(const std::filesystem::path& path,
                            std::span<const Explanation> explanations);
// CSV feature,mean_abs_phi,rank
void write_summary_csv(const std::filesystem::path& path, const ImpactSummary& summary);

}  // namespace susp::explain

#endif  // SUSP_EXPLAIN_HPP_

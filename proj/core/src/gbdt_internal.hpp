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

#ifndef SUSP_SRC_GBDT_INTERNAL_HPP_
#define SUSP_SRC_GBDT_INTERNAL_HPP_

#include <span>
#include <vector>

#include "susp/model.hpp"

namespace susp::model::detail {

// x is n x m row-major with no missing values. Fills trees, base_score,
// importance and training_loss.
void fit_gbdt(const std::vector<double>& x, std::size_t n, std::size_t m,
              std::span<const int> y, const GbdtParams& p, int threads,
              TrainedModel& out);

void fit_logistic(const std::vector<double>& x, std::size_t n, std::size_t m,
                  std::span<const int> y, const LogisticParams& p, TrainedModel& out);

}  // namespace susp::model::detail

#endif  // SUSP_SRC_GBDT_INTERNAL_HPP_

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

#ifndef SUSP_COMMON_HPP_
#define SUSP_COMMON_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace susp {

// UTC seconds since the Unix epoch.
using Epoch = std::int64_t;

inline constexpr Epoch kSecondsPerDay = 86400;

// Missing-value sentinel carried through feature matrices.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

enum class ErrorCode {
  kInvalidArgument,
  kMalformedRecord,
  kEmptyClass,
  kNoSnapshot,
  kMissingEmbedding,
  kDimensionMismatch,
  kEmptyGraph,
  kUserSetMismatch,
  kTooFewSamples,
  kDegenerateLabels,
  kSchemaMismatch,
  kTooManyFeatures,
  kMissingArtifact,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// Every library failure is reported through this exception type; the code
// tells callers (and the CLI exit-code mapping) which contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

// min/max/mean/population-std over a sample. All fields are kMissing when
// the sample is empty.
struct SummaryStats {
  double min = kMissing;
  double max = kMissing;
  double mean = kMissing;
  double std = kMissing;

  bool empty() const { return is_missing(mean); }
};

SummaryStats summarize(std::span<const double> values);

// Appends "<prefix>_min", "<prefix>_max", "<prefix>_mean", "<prefix>_std".
void append_stat_names(std::string_view prefix, std::vector<std::string>& out);
void append_stat_values(const SummaryStats& s, std::vector<double>& out);

}  // namespace susp

#endif  // SUSP_COMMON_HPP_

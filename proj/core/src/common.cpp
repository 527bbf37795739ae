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

#include "susp/common.hpp"

#include <algorithm>

namespace susp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kEmptyClass: return "EmptyClass";
    case ErrorCode::kNoSnapshot: return "NoSnapshot";
    case ErrorCode::kMissingEmbedding: return "MissingEmbedding";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyGraph: return "EmptyGraph";
    case ErrorCode::kUserSetMismatch: return "UserSetMismatch";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kDegenerateLabels: return "DegenerateLabels";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kTooManyFeatures: return "TooManyFeatures";
    case ErrorCode::kMissingArtifact: return "MissingArtifact";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

SummaryStats summarize(std::span<const double> values) {
  SummaryStats s;
  if (values.empty()) return s;
  double lo = values[0];
  double hi = values[0];
  double sum = 0.0;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
  }
  const double n = static_cast<double>(values.size());
  const double mean = sum / n;
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  s.min = lo;
  s.max = hi;
  // Clamp so rounding never pushes the mean outside [min, max].
  s.mean = std::clamp(mean, lo, hi);
  s.std = std::sqrt(sq / n);
  return s;
}

void append_stat_names(std::string_view prefix, std::vector<std::string>& out) {
  for (const char* suffix : {"_min", "_max", "_mean", "_std"}) {
    out.push_back(std::string(prefix) + suffix);
  }
}

void append_stat_values(const SummaryStats& s, std::vector<double>& out) {
  out.push_back(s.min);
  out.push_back(s.max);
  out.push_back(s.mean);
  out.push_back(s.std);
}

}  // namespace susp

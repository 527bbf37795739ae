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

// Reference implementations used as test oracles. They share no code with
// susp::core and favour obviousness over speed.

#ifndef SUSP_TESTS_ORACLES_HPP_
#define SUSP_TESTS_ORACLES_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

// Cyclic Jacobi rotations on a symmetric matrix. Eigenvalues descending,
// vectors[i] is the unit eigenvector of values[i].
struct Eigen {
  std::vector<double> values;
  Matrix vectors;
};
Eigen jacobi_eigen(Matrix a);

// Sample covariance (n - 1 denominator) of the rows.
Matrix covariance(const Matrix& rows);

// Greedy leader clustering by exhaustive comparison with every leader: an
// item joins the most similar leader with cosine >= tau (earliest on ties),
// otherwise it becomes a leader. Returns the cluster index of every item.
std::vector<std::size_t> leader_partition(const Matrix& rows, double tau);

double cosine(const std::vector<double>& a, const std::vector<double>& b);

// Interventional Shapley values with v(S) = mean over background rows of
// f(x_S, b_rest).
using Fn = std::function<double(const std::vector<double>&)>;
std::vector<double> shapley_by_subsets(const Fn& f, const std::vector<double>& x,
                                       const Matrix& background);
// Average marginal contribution over all m! orderings. Keep m <= 7.
std::vector<double> shapley_by_permutations(const Fn& f, const std::vector<double>& x,
                                            const Matrix& background);

std::size_t levenshtein(const std::u32string& a, const std::u32string& b);

// FIPS 180-4 SHA-256.
std::array<std::uint8_t, 32> sha256(const std::vector<std::uint8_t>& data);

std::string base58_encode(const std::vector<std::uint8_t>& bytes);
bool base58_decode(const std::string& s, std::vector<std::uint8_t>& out);
std::string base58check_encode(const std::vector<std::uint8_t>& payload);
bool base58check_valid(const std::string& s, std::vector<std::uint8_t>* payload = nullptr);

// BIP-173 / BIP-350 reference checksum.
std::string bech32_encode(const std::string& hrp, const std::vector<std::uint8_t>& data,
                          bool bech32m);
bool bech32_valid(const std::string& s);

// Fraction of (positive, negative) pairs ordered correctly, ties count half.
double pairwise_auc(const std::vector<double>& pos, const std::vector<double>& neg);

}  // namespace oracle

#endif  // SUSP_TESTS_ORACLES_HPP_

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

#ifndef SUSP_TESTS_WALLET_FIXTURE_HPP_
#define SUSP_TESTS_WALLET_FIXTURE_HPP_

#include <string>
#include <vector>

namespace oracle {

struct WalletCase {
  std::string text;
  bool valid;
  std::string address;  // expected hit (normalized) when valid
};

// 10 valid addresses and 20 near misses, each embedded in a short post.
std::vector<WalletCase> wallet_fixture();

}  // namespace oracle

#endif  // SUSP_TESTS_WALLET_FIXTURE_HPP_

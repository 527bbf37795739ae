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

#ifndef SUSP_WALLETS_HPP_
#define SUSP_WALLETS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace susp::clustering {

namespace base58 {

std::string encode(std::span<const std::uint8_t> bytes);
std::optional<std::vector<std::uint8_t>> decode(std::string_view s);
// Appends the first four bytes of double SHA-256.
std::string encode_check(std::span<const std::uint8_t> payload);
// Returns the payload when the trailing checksum verifies.
std::optional<std::vector<std::uint8_t>> decode_check(std::string_view s);

}  // namespace base58

namespace bech32 {

enum class Variant { kBech32, kBech32m };

struct Decoded {
  std::string hrp;
  std::vector<std::uint8_t> data;  // 5-bit groups, checksum removed
  Variant variant;
};

std::string encode(std::string_view hrp, std::span<const std::uint8_t> data,
                   Variant variant);
// Rejects mixed case, bad characters, and failed checksums.
std::optional<Decoded> decode(std::string_view s);

}  // namespace bech32

enum class Chain { kBitcoin, kEthereum };

std::string_view chain_label(Chain c);

struct WalletHit {
  std::string address;
  Chain chain;
  std::string tweet_id;
  std::string user_id;

  bool operator==(const WalletHit&) const = default;
};

struct WalletDocument {
  std::string tweet_id;
  std::string user_id;
  std::string text;
};

bool is_bitcoin_address(std::string_view token);
bool is_ethereum_address(std::string_view token);

// Scans whitespace/punctuation-delimited alphanumeric runs. Bech32 addresses
// are reported lower-cased. One hit per (address, tweet).
std::vector<WalletHit> extract_wallets(std::span<const WalletDocument> docs,
                                       int threads = 1);

// CSV address,chain,tweet_id,user_id
void write_wallet_csv(const std::filesystem::path& path,
                      std::span<const WalletHit> hits);

}  // namespace susp::clustering

#endif  // SUSP_WALLETS_HPP_

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

#include "susp/wallets.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

#include "susp/io.hpp"
#include "susp/parallel.hpp"

namespace susp::clustering {

namespace base58 {
namespace {

constexpr std::string_view kAlphabet =
    "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

int digit(char c) {
  const auto pos = kAlphabet.find(c);
  return pos == std::string_view::npos ? -1 : static_cast<int>(pos);
}

std::array<std::uint8_t, 4> checksum(std::span<const std::uint8_t> payload) {
  const auto first = io::sha256(payload);
  const auto second = io::sha256(first);
  return {second[0], second[1], second[2], second[3]};
}

}  // namespace

std::string encode(std::span<const std::uint8_t> bytes) {
  std::size_t zeros = 0;
  while (zeros < bytes.size() && bytes[zeros] == 0) ++zeros;
  // Little-endian base-58 digits of the big-endian input.
  std::vector<std::uint8_t> digits;
  for (std::size_t i = zeros; i < bytes.size(); ++i) {
    unsigned carry = bytes[i];
    for (auto& d : digits) {
      carry += static_cast<unsigned>(d) << 8;
      d = static_cast<std::uint8_t>(carry % 58);
      carry /= 58;
    }
    while (carry > 0) {
      digits.push_back(static_cast<std::uint8_t>(carry % 58));
      carry /= 58;
    }
  }
  std::string out(zeros, '1');
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) out += kAlphabet[*it];
  return out;
}

std::optional<std::vector<std::uint8_t>> decode(std::string_view s) {
  std::size_t ones = 0;
  while (ones < s.size() && s[ones] == '1') ++ones;
  std::vector<std::uint8_t> bytes;  // little-endian
  for (std::size_t i = ones; i < s.size(); ++i) {
    const int d = digit(s[i]);
    if (d < 0) return std::nullopt;
    unsigned carry = static_cast<unsigned>(d);
    for (auto& b : bytes) {
      carry += static_cast<unsigned>(b) * 58;
      b = static_cast<std::uint8_t>(carry & 0xff);
      carry >>= 8;
    }
    while (carry > 0) {
      bytes.push_back(static_cast<std::uint8_t>(carry & 0xff));
      carry >>= 8;
    }
  }
  std::vector<std::uint8_t> out(ones, 0);
  out.insert(out.end(), bytes.rbegin(), bytes.rend());
  return out;
}

std::string encode_check(std::span<const std::uint8_t> payload) {
  std::vector<std::uint8_t> full(payload.begin(), payload.end());
  const auto sum = checksum(payload);
  full.insert(full.end(), sum.begin(), sum.end());
  return encode(full);
}

std::optional<std::vector<std::uint8_t>> decode_check(std::string_view s) {
  auto raw = decode(s);
  if (!raw || raw->size() < 4) return std::nullopt;
  std::vector<std::uint8_t> payload(raw->begin(), raw->end() - 4);
  const auto sum = checksum(payload);
  if (!std::equal(sum.begin(), sum.end(), raw->end() - 4)) return std::nullopt;
  return payload;
}

}  // namespace base58

namespace bech32 {
namespace {

constexpr std::string_view kCharset = "qpzry9x8gf2tvdw0s3jn54khce6mua7l";
constexpr std::uint32_t kBech32Const = 1;
constexpr std::uint32_t kBech32mConst = 0x2bc830a3;

std::uint32_t polymod(const std::vector<std::uint8_t>& values) {
  constexpr std::uint32_t kGen[5] = {0x3b6a57b2, 0x26508e6d, 0x1ea119fa,
                                     0x3d4233dd, 0x2a1462b3};
  std::uint32_t chk = 1;
  for (std::uint8_t v : values) {
    const std::uint32_t top = chk >> 25;
    chk = ((chk & 0x1ffffff) << 5) ^ v;
    for (int i = 0; i < 5; ++i) {
      if ((top >> i) & 1) chk ^= kGen[i];
    }
  }
  return chk;
}

std::vector<std::uint8_t> hrp_expand(std::string_view hrp) {
  std::vector<std::uint8_t> out;
  for (char c : hrp) out.push_back(static_cast<std::uint8_t>(c) >> 5);
  out.push_back(0);
  for (char c : hrp) out.push_back(static_cast<std::uint8_t>(c) & 31);
  return out;
}

std::uint32_t variant_const(Variant v) {
  return v == Variant::kBech32 ? kBech32Const : kBech32mConst;
}

}  // namespace

std::string encode(std::string_view hrp, std::span<const std::uint8_t> data,
                   Variant variant) {
  auto values = hrp_expand(hrp);
  values.insert(values.end(), data.begin(), data.end());
  values.insert(values.end(), 6, 0);
  const std::uint32_t mod = polymod(values) ^ variant_const(variant);
  std::string out(hrp);
  out += '1';
  for (std::uint8_t d : data) out += kCharset[d & 31];
  for (int i = 0; i < 6; ++i) out += kCharset[(mod >> (5 * (5 - i))) & 31];
  return out;
}

std::optional<Decoded> decode(std::string_view s) {
  if (s.size() < 8 || s.size() > 90) return std::nullopt;
  bool lower = false;
  bool upper = false;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 33 || u > 126) return std::nullopt;
    lower |= std::islower(u) != 0;
    upper |= std::isupper(u) != 0;
  }
  if (lower && upper) return std::nullopt;
  std::string folded(s);
  for (char& c : folded) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  const auto sep = folded.rfind('1');
  if (sep == std::string::npos || sep == 0 || sep + 7 > folded.size()) {
    return std::nullopt;
  }
  Decoded out;
  out.hrp = folded.substr(0, sep);
  std::vector<std::uint8_t> values;
  for (std::size_t i = sep + 1; i < folded.size(); ++i) {
    const auto pos = kCharset.find(folded[i]);
    if (pos == std::string_view::npos) return std::nullopt;
    values.push_back(static_cast<std::uint8_t>(pos));
  }
  auto check = hrp_expand(out.hrp);
  check.insert(check.end(), values.begin(), values.end());
  const std::uint32_t mod = polymod(check);
  if (mod == kBech32Const) {
    out.variant = Variant::kBech32;
  } else if (mod == kBech32mConst) {
    out.variant = Variant::kBech32m;
  } else {
    return std::nullopt;
  }
  out.data.assign(values.begin(), values.end() - 6);
  return out;
}

}  // namespace bech32

std::string_view chain_label(Chain c) {
  return c == Chain::kBitcoin ? "bitcoin" : "ethereum";
}

bool is_ethereum_address(std::string_view token) {
  if (token.size() != 42 || token[0] != '0' || (token[1] != 'x' && token[1] != 'X')) {
    return false;
  }
  return std::all_of(token.begin() + 2, token.end(), [](char c) {
    return std::isxdigit(static_cast<unsigned char>(c)) != 0;
  });
}

bool is_bitcoin_address(std::string_view token) {
  if (token.size() >= 3 && (token.substr(0, 3) == "bc1" || token.substr(0, 3) == "BC1")) {
    auto d = bech32::decode(token);
    return d && d->hrp == "bc" && !d->data.empty();
  }
  if (token.size() < 26 || token.size() > 35) return false;
  if (token[0] != '1' && token[0] != '3') return false;
  auto payload = base58::decode_check(token);
  if (!payload || payload->size() != 21) return false;
  const std::uint8_t version = (*payload)[0];
  return (token[0] == '1' && version == 0x00) || (token[0] == '3' && version == 0x05);
}

namespace {

std::vector<WalletHit> scan(const WalletDocument& doc) {
  std::vector<WalletHit> hits;
  std::set<std::string> seen;
  const std::string_view text = doc.text;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isalnum(static_cast<unsigned char>(text[i])) == 0) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && std::isalnum(static_cast<unsigned char>(text[j])) != 0) ++j;
    const std::string_view token = text.substr(i, j - i);
    i = j;
    std::optional<Chain> chain;
    std::string address(token);
    if (is_ethereum_address(token)) {
      chain = Chain::kEthereum;
    } else if (is_bitcoin_address(token)) {
      chain = Chain::kBitcoin;
      if (address.starts_with("BC1")) {
        for (char& c : address) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
    }
    if (chain && seen.insert(address).second) {
      hits.push_back({std::move(address), *chain, doc.tweet_id, doc.user_id});
    }
  }
  return hits;
}

}  // namespace

std::vector<WalletHit> extract_wallets(std::span<const WalletDocument> docs,
                                       int threads) {
  std::vector<std::vector<WalletHit>> per_doc(docs.size());
  parallel_for(docs.size(), threads, [&](std::size_t i) { per_doc[i] = scan(docs[i]); });
  std::vector<WalletHit> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (auto& hits : per_doc) {
    for (auto& h : hits) {
      if (seen.emplace(h.address, h.tweet_id).second) out.push_back(std::move(h));
    }
  }
  return out;
}

void write_wallet_csv(const std::filesystem::path& path,
                      std::span<const WalletHit> hits) {
  io::AtomicFile f(path);
  auto& out = f.stream();
  out << "address,chain,tweet_id,user_id\n";
  for (const auto& h : hits) {
    out << io::csv_escape(h.address) << ',' << chain_label(h.chain) << ','
        << io::csv_escape(h.tweet_id) << ',' << io::csv_escape(h.user_id) << '\n';
  }
  f.commit();
}

}  // namespace susp::clustering

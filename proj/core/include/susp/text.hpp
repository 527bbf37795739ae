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

#ifndef SUSP_TEXT_HPP_
#define SUSP_TEXT_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace susp::text {

// Decodes UTF-8 into code points; invalid bytes map to U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

// Simple case folding covering ASCII, Latin-1, Latin Extended-A, Greek and
// Cyrillic. Enough for name comparison and tokenization of the corpora this
// toolkit sees; it is not a full Unicode CaseFolding.txt implementation.
char32_t fold_case(char32_t c);
std::u32string fold_case(std::u32string_view s);
std::string fold_case_utf8(std::string_view s);

bool is_space(char32_t c);
bool is_punct(char32_t c);

// Whitespace split, then trims leading/trailing punctuation from every token.
// Empty results are dropped. Tokens are case-folded.
std::vector<std::string> tokenize(std::string_view s);

// Trims punctuation from both ends of a raw token and case-folds it.
std::string normalize_token(std::string_view token);

// Whitespace split without trimming or folding.
std::vector<std::string_view> split_whitespace(std::string_view s);

bool is_url_token(std::string_view token);
bool is_mention_token(std::string_view token);

std::size_t codepoint_length(std::string_view s);

// Levenshtein distance over code points.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

// Case-insensitive count of non-overlapping occurrences of needle.
std::size_t count_occurrences_icase(std::string_view haystack,
                                    std::string_view needle);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace susp::text

#endif  // SUSP_TEXT_HPP_

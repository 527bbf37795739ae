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

#ifndef SUSP_IO_HPP_
#define SUSP_IO_HPP_

#include <filesystem>
#include <fstream>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace susp::io {

// Writes to "<path>.tmp" and renames onto path on commit(). An uncommitted
// file is removed on destruction, so readers never see partial output.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path path, bool binary = false);
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;
  ~AtomicFile();

  std::ostream& stream() { return out_; }
  void commit();

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);
std::string read_file(const std::filesystem::path& path);

// Calls fn for every line (without the trailing newline, CR stripped).
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::string_view)>& fn);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);
std::vector<unsigned char> sha256(std::span<const unsigned char> bytes);

// Minimal RFC 4180 CSV support: quoted fields, doubled quotes.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);

// Shortest round-trip decimal for a double; missing values render empty.
std::string format_double(double v);
// Parses a CSV numeric cell; empty means missing.
double parse_double_cell(std::string_view cell);

}  // namespace susp::io

#endif  // SUSP_IO_HPP_

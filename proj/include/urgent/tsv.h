/* Copyright 2026 The urgent-forge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Small text-table helpers shared by the file formats.

#ifndef URGENT_TSV_H_
#define URGENT_TSV_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace urgent {

struct TsvRow {
  std::size_t line = 0;  // 1-based
  std::vector<std::string> fields;
};

// Skips blank lines and lines starting with '#'. Throws kIo.
std::vector<TsvRow> read_tsv(const std::filesystem::path& path);

// One entry per non-blank line, surrounding whitespace trimmed.
std::vector<std::string> read_path_list(const std::filesystem::path& path);

std::vector<std::string> split(std::string_view line, char sep);

double parse_double(const std::string& text, const std::filesystem::path& file, std::size_t line);

std::string read_text_file(const std::filesystem::path& path);

// Creates parent directories. Throws kWrite.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace urgent

#endif  // URGENT_TSV_H_

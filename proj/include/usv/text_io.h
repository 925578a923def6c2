// include/usv/text_io.h

// Copyright 2026  The usvctx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef USV_TEXT_IO_H_
#define USV_TEXT_IO_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace usv {

// Splits one delimited line. Fields may be wrapped in double quotes, with ""
// as an escaped quote inside a quoted field. A trailing '\r' is ignored.
std::vector<std::string> split_delimited(std::string_view line, char delimiter);

// Quotes a field if it contains the delimiter, a quote, or a newline.
std::string quote_field(std::string_view field, char delimiter = ',');

std::string_view trim(std::string_view s);

// Ordered "key = value" entries. '#' starts a comment line; blank lines are
// skipped. Throws ConfigError on a line without '='.
struct KeyValueFile {
  std::vector<std::pair<std::string, std::string>> entries;

  static KeyValueFile parse(std::string_view text, std::string_view origin);
  static KeyValueFile load(const std::filesystem::path& path);

  std::optional<std::string> get(std::string_view key) const;
};

// Shortest "%.6g" rendering used for every float written to a CSV.
std::string format_g6(double v);

// Whole-file read; throws IoError.
std::string read_file(const std::filesystem::path& path);

// Writes atomically enough for our purposes (truncate + write); throws IoError.
void write_file(const std::filesystem::path& path, std::string_view contents);

// Non-empty, non-comment lines of a CSV file produced by this toolkit.
std::vector<std::string> data_lines(std::string_view contents);

}  // namespace usv

#endif  // USV_TEXT_IO_H_

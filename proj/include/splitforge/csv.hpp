// Copyright 2026 The SplitForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPLITFORGE_CSV_HPP_
#define SPLITFORGE_CSV_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace splitforge::csv {

// A parsed CSV document: header row plus data rows. Every data row has
// exactly header.size() fields.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const;
};

// Parses RFC-4180 text: comma-delimited, double-quote quoting with "" as
// the escaped quote, CRLF or LF record terminators, embedded newlines in
// quoted fields. A leading UTF-8 byte order mark is skipped. Throws
// ValidationError on unterminated quotes or ragged rows.
Table parse(std::string_view text);

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

std::string format_row(const std::vector<std::string>& fields);

}  // namespace splitforge::csv

#endif  // SPLITFORGE_CSV_HPP_

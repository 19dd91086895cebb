//
// Copyright 2026 The DP-TOST Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//


// Minimal RFC 4180 reading and writing plus file helpers that attach the path
// to I/O errors.

#ifndef DPTOST_CSV_H_
#define DPTOST_CSV_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dptost {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Shortest decimal text that parses back to exactly `value`; infinities are
// written as "inf" and "-inf".
std::string FormatDouble(double value);

// Quotes a field when it contains a comma, quote, CR or LF.
std::string CsvEscape(std::string_view field);

// Header line then one line per row, CRLF-free ("\n" terminated).
std::string ToCsv(const CsvTable& table);

// Parses quoted and unquoted fields. Every row must have as many fields as
// the header.
absl::StatusOr<CsvTable> ParseCsv(std::string_view text);

// Parses "inf", "-inf" and anything std::from_chars accepts.
absl::StatusOr<double> ParseDouble(std::string_view text);

absl::StatusOr<std::string> ReadTextFile(const std::string& path);
absl::Status WriteTextFile(const std::string& path, std::string_view contents);

}  // namespace dptost

#endif  // DPTOST_CSV_H_

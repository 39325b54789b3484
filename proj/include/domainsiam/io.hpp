// Copyright 2026 the domainsiam authors
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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "domainsiam/tensor.hpp"

namespace domainsiam {

// Binary PGM (P5, maxval 255). Pixels map to [0, 1] by /255; writing rounds
// and clamps.
Frame read_pgm(std::istream& in);
Frame read_pgm(const std::filesystem::path& path);
void write_pgm(const Frame& frame, std::ostream& out);
void write_pgm(const Frame& frame, const std::filesystem::path& path);

/// Round-trip text for a double: 17 significant digits, '.' decimal,
/// independent of the global locale.
std::string format_real(double v);

/// Accumulates rows and renders comma-separated text with a header row.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter& cell(std::string_view text);
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  void end_row();

  const std::string& str() const { return text_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::size_t in_row_ = 0;
  std::string text_;
};

/// Split one CSV line on commas (no quoting support; none is emitted).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace domainsiam

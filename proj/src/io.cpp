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

#include "domainsiam/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "domainsiam/error.hpp"

namespace domainsiam {

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

std::size_t pgm_number(std::istream& in) {
  const std::string tok = pgm_token(in);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw FormatError("PGM: bad header field '" + tok + "'");
  }
  return v;
}

}  // namespace

Frame read_pgm(std::istream& in) {
  if (pgm_token(in) != "P5") throw FormatError("PGM: expected P5 magic");
  const std::size_t width = pgm_number(in);
  const std::size_t height = pgm_number(in);
  const std::size_t maxval = pgm_number(in);
  if (width == 0 || height == 0 || width > (1u << 15) || height > (1u << 15)) {
    throw FormatError("PGM: bad dimensions");
  }
  if (maxval != 255) throw FormatError("PGM: only maxval 255 is supported");
  // pgm_token consumed exactly one whitespace byte after maxval.
  std::vector<unsigned char> bytes(width * height);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw FormatError("PGM: truncated pixel data");
  }
  Frame f(height, width);
  for (std::size_t i = 0; i < bytes.size(); ++i) f.values()[i] = bytes[i] / 255.0;
  return f;
}

Frame read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_pgm(in);
}

void write_pgm(const Frame& frame, std::ostream& out) {
  out << "P5\n" << frame.width() << ' ' << frame.height() << "\n255\n";
  std::vector<unsigned char> bytes(frame.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const double v = std::clamp(frame.values()[i], 0.0, 1.0);
    bytes[i] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("PGM: write failed");
}

void write_pgm(const Frame& frame, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_pgm(frame, out);
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res =
      std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

CsvWriter& CsvWriter::cell(std::string_view text) {
  if (in_row_ == columns_) throw InvalidArgument("CSV row has too many cells");
  if (in_row_++) text_ += ',';
  text_.append(text);
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(std::string_view(format_real(v))); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::string_view(std::to_string(v))); }

void CsvWriter::end_row() {
  if (in_row_ != columns_) throw InvalidArgument("CSV row has too few cells");
  text_ += '\n';
  in_row_ = 0;
}

void CsvWriter::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << text_;
  if (!out) throw FormatError("write failed: " + path.string());
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
  return out;
}

}  // namespace domainsiam

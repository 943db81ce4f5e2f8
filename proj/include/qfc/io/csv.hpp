// Copyright 2026 The QFC Authors
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

#ifndef QFC_IO_CSV_HPP
#define QFC_IO_CSV_HPP

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "qfc/core/linalg.hpp"

namespace qfc::io {

/// %.17g, so values round-trip exactly.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Quotes a field when it holds a comma, quote or line break.
inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

using Cell = std::variant<double, long long, std::string>;

inline std::string format_cell(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_double(*d);
  if (const long long* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return csv_escape(std::get<std::string>(c));
}

/// Sorted `# key=value` lines.
using Preamble = std::map<std::string, std::string>;

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<Cell> row) {
    if (row.size() != header_.size()) throw std::invalid_argument("CsvTable: row width differs from header");
    rows_.push_back(std::move(row));
  }

  std::size_t size() const { return rows_.size(); }

  std::string str(const Preamble& preamble) const {
    std::ostringstream os;
    for (const auto& [k, v] : preamble) os << "# " << k << '=' << v << '\n';
    for (std::size_t i = 0; i < header_.size(); ++i) os << (i ? "," : "") << csv_escape(header_[i]);
    os << '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_cell(r[i]);
      os << '\n';
    }
    return os.str();
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw Error("write failed for " + path.string());
}

/// Plain PGM (P2, maxval 255). -1 maps to 0; a count c maps to
/// 255 - round(254 c / max_count), so fast convergence is bright.
inline std::string pgm_string(const std::vector<int>& counts, int width, int height, int max_count,
                              const Preamble& preamble = {}) {
  if (static_cast<std::size_t>(width) * height != counts.size()) throw std::invalid_argument("pgm: size mismatch");
  if (max_count < 1) throw std::invalid_argument("pgm: max_count must be >= 1");
  std::ostringstream os;
  os << "P2\n";
  for (const auto& [k, v] : preamble) os << "# " << k << '=' << v << '\n';
  os << width << ' ' << height << "\n255\n";
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const int v = counts[static_cast<std::size_t>(r) * width + c];
      const int g = v < 0 ? 0 : 255 - static_cast<int>(std::lround(254.0 * v / max_count));
      // at most 17 values per line keeps lines under 70 characters
      os << g << (c + 1 == width || c % 17 == 16 ? '\n' : ' ');
    }
  }
  return os.str();
}

} // namespace qfc::io

#endif // QFC_IO_CSV_HPP

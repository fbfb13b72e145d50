// Copyright 2026 The opgrowth Authors
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

#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "opgrowth/errors.hpp"

namespace opgrowth {

/// Shortest-stable text for a double: 12 significant digits, "nan"/"inf" spelled out.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

using CsvCell = std::variant<double, long long, std::string>;

/// Comma-separated table with '#' metadata lines ahead of the header row.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void meta(std::string key, std::string value) { meta_.emplace_back(std::move(key), std::move(value)); }

  void row(std::vector<CsvCell> cells) {
    if (cells.size() != columns_.size()) throw Error("csv: row width does not match header");
    rows_.push_back(std::move(cells));
  }

  std::size_t size() const { return rows_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }

  void write(std::ostream& os) const {
    for (const auto& [k, v] : meta_) os << "# " << k << ": " << v << '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
    os << '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) os << ',';
        std::visit(
            [&](const auto& c) {
              using T = std::decay_t<decltype(c)>;
              if constexpr (std::is_same_v<T, double>) os << format_number(c);
              else os << c;
            },
            r[i]);
      }
      os << '\n';
    }
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    write(f);
    if (!f) throw Error("write failed for " + path.string());
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::vector<CsvCell>> rows_;
};

}  // namespace opgrowth

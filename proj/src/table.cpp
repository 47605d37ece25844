// Copyright 2026 The relboost Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "relboost/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <string_view>
#include <unordered_set>

#include "relboost/error.hpp"

namespace relboost {

namespace {

void check_unique(const std::string& table, const std::vector<std::string>& columns) {
  std::unordered_set<std::string> seen;
  for (const auto& c : columns) {
    if (!seen.insert(c).second) {
      throw SchemaError("table '" + table + "': duplicate column '" + c + "'");
    }
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

}  // namespace

Table::Table(std::string name, std::vector<std::string> columns,
             std::vector<double> row_major_values)
    : name_(std::move(name)),
      columns_(std::move(columns)),
      values_(std::move(row_major_values)) {
  check_unique(name_, columns_);
  if (columns_.empty()) {
    if (!values_.empty()) throw SchemaError("table '" + name_ + "': values without columns");
    return;
  }
  if (values_.size() % columns_.size() != 0) {
    throw SchemaError("table '" + name_ + "': value count is not a multiple of the column count");
  }
  num_rows_ = values_.size() / columns_.size();
}

Table::Table(std::string name, std::vector<std::string> columns,
             const std::vector<std::vector<double>>& rows)
    : name_(std::move(name)), columns_(std::move(columns)) {
  check_unique(name_, columns_);
  values_.reserve(rows.size() * columns_.size());
  for (const auto& r : rows) {
    if (r.size() != columns_.size()) {
      throw SchemaError("table '" + name_ + "': row has " + std::to_string(r.size()) +
                        " values, expected " + std::to_string(columns_.size()));
    }
    values_.insert(values_.end(), r.begin(), r.end());
  }
  num_rows_ = rows.size();
}

std::optional<std::size_t> Table::column_index(const std::string& column) const {
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c] == column) return c;
  }
  return std::nullopt;
}

Table load_table(std::istream& in, std::string name) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  bool have_header = false;
  std::vector<double> values;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto fields = split_fields(view);
    if (!have_header) {
      for (std::size_t c = 0; c < fields.size(); ++c) {
        if (fields[c].empty()) throw ParseError("empty column name", line_no, c + 1);
        header.emplace_back(fields[c]);
      }
      check_unique(name, header);
      have_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no, fields.size() < header.size() ? fields.size() + 1 : header.size() + 1);
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto f = fields[c];
      double v = 0.0;
      const char* first = f.data();
      if (!f.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw ParseError("field '" + std::string(f) + "' of column '" + header[c] +
                             "' is not a finite number",
                         line_no, c + 1);
      }
      values.push_back(v);
    }
  }
  if (!have_header) throw ParseError("missing header", line_no == 0 ? 1 : line_no, 1);
  return Table(std::move(name), std::move(header), std::move(values));
}

Table load_table(const std::filesystem::path& path, std::string name) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return load_table(in, std::move(name));
}

}  // namespace relboost

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

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace relboost {

// A named relation of 64-bit floating point columns, stored row-major.
// Duplicate rows are kept: every row contributes multiplicity to joins.
class Table {
 public:
  Table() = default;

  // Throws SchemaError on duplicate column names or ragged rows.
  Table(std::string name, std::vector<std::string> columns,
        std::vector<double> row_major_values);
  Table(std::string name, std::vector<std::string> columns,
        const std::vector<std::vector<double>>& rows);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t num_columns() const { return columns_.size(); }
  std::size_t num_rows() const { return num_rows_; }

  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * columns_.size(), columns_.size()};
  }
  double at(std::size_t r, std::size_t c) const {
    return values_[r * columns_.size() + c];
  }
  std::optional<std::size_t> column_index(const std::string& column) const;
  const std::vector<double>& values() const { return values_; }

 private:
  std::string name_;
  std::vector<std::string> columns_;
  std::vector<double> values_;
  std::size_t num_rows_ = 0;
};

// Parses comma-delimited numeric CSV with a header line. Rows keep file
// order. Throws ParseError (with line/column) on non-numeric or non-finite
// fields and on ragged records, SchemaError on duplicate header names.
Table load_table(std::istream& in, std::string name);
Table load_table(const std::filesystem::path& path, std::string name);

}  // namespace relboost

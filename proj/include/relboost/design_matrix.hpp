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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relboost/database.hpp"

namespace relboost {

inline constexpr std::size_t kDefaultJoinCap = 1'000'000;

// The materialized natural join. Column order follows Database::features(),
// so column index == FeatureId.
class DesignMatrix {
 public:
  DesignMatrix(std::vector<std::string> columns, std::vector<double> row_major,
               std::optional<std::size_t> label_index);

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t num_columns() const { return columns_.size(); }
  std::size_t num_rows() const { return num_rows_; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * columns_.size(), columns_.size()};
  }
  const std::optional<std::size_t>& label_index() const { return label_; }

 private:
  std::vector<std::string> columns_;
  std::vector<double> values_;
  std::size_t num_rows_ = 0;
  std::optional<std::size_t> label_;
};

// Exact bag-semantics natural join, rows sorted lexicographically by full
// tuple. Throws ResourceError once the output would exceed `cap` rows.
DesignMatrix materialize_join(const Database& db, std::size_t cap = kDefaultJoinCap);

}  // namespace relboost

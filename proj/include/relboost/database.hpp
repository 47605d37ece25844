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
#include <string>
#include <vector>

#include "relboost/table.hpp"

namespace relboost {

using FeatureId = std::size_t;

// A set of tables joined naturally on equally named columns, plus the
// optional label column. Features are numbered in order of first appearance
// across tables in declaration order. Each feature is owned by the lowest
// indexed table that contains it; owners are where per-feature factors and
// gates are applied.
class Database {
 public:
  // Throws SchemaError if a table name repeats, if the label is carried by
  // more than one table, or if a named label is absent.
  explicit Database(std::vector<Table> tables,
                    std::optional<std::string> label = std::nullopt);

  std::size_t num_tables() const { return tables_.size(); }
  const Table& table(std::size_t t) const { return tables_[t]; }
  const std::vector<Table>& tables() const { return tables_; }
  std::optional<std::size_t> table_index(const std::string& name) const;

  std::size_t num_features() const { return features_.size(); }
  const std::vector<std::string>& features() const { return features_; }
  const std::string& feature_name(FeatureId f) const { return features_[f]; }
  std::optional<FeatureId> feature_id(const std::string& name) const;

  std::size_t owner(FeatureId f) const { return owner_[f]; }
  // Feature ids owned by table t, in the table's column order.
  const std::vector<FeatureId>& owned_features(std::size_t t) const {
    return owned_[t];
  }
  // Feature id of every column of table t.
  const std::vector<FeatureId>& column_features(std::size_t t) const {
    return column_features_[t];
  }
  std::optional<std::size_t> column_of(std::size_t t, FeatureId f) const;

  const std::optional<FeatureId>& label_feature() const { return label_; }
  // Table carrying the label; equals owner(*label_feature()).
  std::optional<std::size_t> label_table() const;
  const std::string& label_name() const;

 private:
  std::vector<Table> tables_;
  std::vector<std::string> features_;
  std::vector<std::size_t> owner_;
  std::vector<std::vector<FeatureId>> owned_;
  std::vector<std::vector<FeatureId>> column_features_;
  std::optional<FeatureId> label_;
};

}  // namespace relboost

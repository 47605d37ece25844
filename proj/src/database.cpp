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

#include "relboost/database.hpp"

#include <unordered_map>

#include "relboost/error.hpp"

namespace relboost {

Database::Database(std::vector<Table> tables, std::optional<std::string> label)
    : tables_(std::move(tables)) {
  std::unordered_map<std::string, FeatureId> ids;
  std::unordered_map<std::string, std::size_t> names;
  owned_.resize(tables_.size());
  column_features_.resize(tables_.size());
  for (std::size_t t = 0; t < tables_.size(); ++t) {
    if (!names.emplace(tables_[t].name(), t).second) {
      throw SchemaError("duplicate table name '" + tables_[t].name() + "'");
    }
    for (const auto& column : tables_[t].columns()) {
      auto [it, fresh] = ids.emplace(column, features_.size());
      if (fresh) {
        features_.push_back(column);
        owner_.push_back(t);
        owned_[t].push_back(it->second);
      }
      column_features_[t].push_back(it->second);
    }
  }
  if (label) {
    const auto it = ids.find(*label);
    if (it == ids.end()) throw SchemaError("label column '" + *label + "' not found in any table");
    std::size_t carriers = 0;
    for (const auto& table : tables_) {
      if (table.column_index(*label)) ++carriers;
    }
    if (carriers > 1) {
      throw SchemaError("label column '" + *label + "' appears in " + std::to_string(carriers) +
                        " tables; at most one may carry it");
    }
    label_ = it->second;
  }
}

std::optional<std::size_t> Database::table_index(const std::string& name) const {
  for (std::size_t t = 0; t < tables_.size(); ++t) {
    if (tables_[t].name() == name) return t;
  }
  return std::nullopt;
}

std::optional<FeatureId> Database::feature_id(const std::string& name) const {
  for (FeatureId f = 0; f < features_.size(); ++f) {
    if (features_[f] == name) return f;
  }
  return std::nullopt;
}

std::optional<std::size_t> Database::column_of(std::size_t t, FeatureId f) const {
  const auto& cols = column_features_[t];
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c] == f) return c;
  }
  return std::nullopt;
}

std::optional<std::size_t> Database::label_table() const {
  if (!label_) return std::nullopt;
  return owner_[*label_];
}

const std::string& Database::label_name() const {
  if (!label_) throw SchemaError("no label column configured");
  return features_[*label_];
}

}  // namespace relboost

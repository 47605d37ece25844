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

#include "relboost/sumprod.hpp"

#include <algorithm>
#include <map>

namespace relboost {

JoinPlan::JoinPlan(const Database& db, JoinTree tree)
    : db_(&db), tree_(std::move(tree)), postorder_(tree_.postorder()) {
  if (tree_.nodes.size() != db.num_tables()) {
    throw QueryError("join tree does not match the database's table count");
  }
  edges_.resize(tree_.nodes.size());
  for (std::size_t node = 0; node < tree_.nodes.size(); ++node) {
    if (!tree_.nodes[node].parent) continue;
    const auto parent = *tree_.nodes[node].parent;
    const auto ct = tree_.nodes[node].table;
    const auto pt = tree_.nodes[parent].table;
    std::vector<std::size_t> child_cols, parent_cols;
    for (std::size_t c = 0; c < db.table(ct).num_columns(); ++c) {
      const auto f = db.column_features(ct)[c];
      if (const auto pc = db.column_of(pt, f)) {
        child_cols.push_back(c);
        parent_cols.push_back(*pc);
      }
    }
    auto project = [](const Table& table, std::size_t r, const std::vector<std::size_t>& cols) {
      std::vector<double> key;
      key.reserve(cols.size());
      for (auto c : cols) key.push_back(table.at(r, c));
      return key;
    };
    std::map<std::vector<double>, std::size_t> keys;
    const auto& child = db.table(ct);
    for (std::size_t r = 0; r < child.num_rows(); ++r) keys.emplace(project(child, r, child_cols), 0);
    std::size_t next = 0;
    for (auto& [key, id] : keys) id = next++;

    Edge& e = edges_[node];
    e.num_keys = keys.size();
    e.child_key.resize(child.num_rows());
    for (std::size_t r = 0; r < child.num_rows(); ++r) {
      e.child_key[r] = keys.at(project(child, r, child_cols));
    }
    const auto& par = db.table(pt);
    e.parent_key.resize(par.num_rows());
    for (std::size_t r = 0; r < par.num_rows(); ++r) {
      const auto it = keys.find(project(par, r, parent_cols));
      e.parent_key[r] = it == keys.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
    }
  }
}

JoinPlan make_plan(const Database& db, std::size_t root_table) {
  const auto h = build_hypergraph(db.tables());
  return JoinPlan(db, build_join_tree(h, root_table));
}

}  // namespace relboost

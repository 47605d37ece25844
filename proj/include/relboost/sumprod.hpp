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
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "relboost/constraints.hpp"
#include "relboost/database.hpp"
#include "relboost/design_matrix.hpp"
#include "relboost/error.hpp"
#include "relboost/hypergraph.hpp"
#include "relboost/semiring.hpp"

namespace relboost {

// A SumProd query: the semiring sum over join rows x of the product of
// factor values. Each feature has one factor q_f(x_f) (absent entries are the
// semiring one), applied once per join row at the feature's owning table.
// Table factors are functions of a whole table row (in the table's column
// order) and cover factors that depend on several owned columns at once.
// Constraints gate rows of the owning table to zero.
template <class V>
struct SumProdQuery {
  using FeatureFactor = std::function<V(double)>;
  using TableFactor = std::function<V(std::span<const double>)>;

  std::map<FeatureId, FeatureFactor> feature_factors;
  std::map<std::size_t, TableFactor> table_factors;
  ConstraintSet constraints;
};

// Per-row results of a grouped query, indexed by row of the grouping table.
template <class V>
using GroupedResult = std::vector<V>;

// A join tree compiled against concrete tables: every tree edge gets a
// dictionary of shared-feature keys (ids assigned in sorted key order) and
// per-row key ids on both sides, so messages are dense arrays.
class JoinPlan {
 public:
  // `db` must outlive the plan.
  JoinPlan(const Database& db, JoinTree tree);

  const Database& database() const { return *db_; }
  const JoinTree& tree() const { return tree_; }
  std::size_t root_table() const { return tree_.nodes[tree_.root].table; }
  const std::vector<std::size_t>& postorder() const { return postorder_; }

  struct Edge {
    std::size_t num_keys = 0;
    std::vector<std::size_t> child_key;      // per row of the child table
    std::vector<std::ptrdiff_t> parent_key;  // per row of the parent; -1 = no match
  };
  // Edge from node `child` to its parent; undefined for the root.
  const Edge& edge(std::size_t child) const { return edges_[child]; }

 private:
  const Database* db_;
  JoinTree tree_;
  std::vector<std::size_t> postorder_;
  std::vector<Edge> edges_;
};

// Builds the join tree rooted at `root_table` and compiles it.
JoinPlan make_plan(const Database& db, std::size_t root_table);

namespace detail {

template <class V>
void validate_query(const Database& db, const SumProdQuery<V>& q) {
  for (const auto& [f, fn] : q.feature_factors) {
    if (f >= db.num_features()) {
      throw QueryError("factor for unknown feature id " + std::to_string(f));
    }
  }
  for (const auto& [t, fn] : q.table_factors) {
    if (t >= db.num_tables()) throw QueryError("factor for unknown table " + std::to_string(t));
  }
  for (const auto& [f, iv] : q.constraints.bounds()) {
    if (f >= db.num_features()) {
      throw QueryError("constraint on unknown feature id " + std::to_string(f));
    }
  }
}

// Rows of table t passing every constraint on features t owns.
template <class V>
std::vector<char> gate_mask(const Database& db, std::size_t t, const SumProdQuery<V>& q) {
  const auto& table = db.table(t);
  std::vector<char> mask(table.num_rows(), 1);
  for (const auto& [f, iv] : q.constraints.bounds()) {
    if (db.owner(f) != t) continue;
    const auto c = *db.column_of(t, f);
    for (std::size_t r = 0; r < table.num_rows(); ++r) {
      if (mask[r] && !iv.contains(table.at(r, c))) mask[r] = 0;
    }
  }
  return mask;
}

// Inside-out pass; returns the aggregate for every row of the plan's root.
template <Semiring S>
GroupedResult<typename S::Value> evaluate_root_rows(const JoinPlan& plan,
                                                   const SumProdQuery<typename S::Value>& q,
                                                   const S& s) {
  using V = typename S::Value;
  const auto& db = plan.database();
  validate_query(db, q);
  const auto& tree = plan.tree();
  std::vector<std::vector<V>> messages(tree.nodes.size());
  GroupedResult<V> result;

  for (const auto node : plan.postorder()) {
    const auto t = tree.nodes[node].table;
    const auto& table = db.table(t);
    const bool is_root = node == tree.root;
    const auto mask = gate_mask(db, t, q);
    const auto table_factor = q.table_factors.find(t);

    std::vector<std::pair<std::size_t, const typename SumProdQuery<V>::FeatureFactor*>> owned;
    for (const auto f : db.owned_features(t)) {
      const auto it = q.feature_factors.find(f);
      if (it != q.feature_factors.end() && it->second) {
        owned.emplace_back(*db.column_of(t, f), &it->second);
      }
    }

    std::vector<V> outgoing;
    if (is_root) {
      result.assign(table.num_rows(), s.zero());
    } else {
      outgoing.assign(plan.edge(node).num_keys, s.zero());
    }

    for (std::size_t r = 0; r < table.num_rows(); ++r) {
      if (!mask[r]) continue;
      bool matched = true;
      for (const auto c : tree.nodes[node].children) {
        if (plan.edge(c).parent_key[r] < 0) {
          matched = false;
          break;
        }
      }
      if (!matched) continue;

      V value = s.one();
      const auto row = table.row(r);
      if (table_factor != q.table_factors.end() && table_factor->second) {
        value = s.times(value, table_factor->second(row));
      }
      for (const auto& [column, fn] : owned) value = s.times(value, (*fn)(row[column]));
      for (const auto c : tree.nodes[node].children) {
        value = s.times(value, messages[c][static_cast<std::size_t>(plan.edge(c).parent_key[r])]);
      }
      if (is_root) {
        result[r] = std::move(value);
      } else {
        s.plus_assign(outgoing[plan.edge(node).child_key[r]], value);
      }
    }
    for (const auto c : tree.nodes[node].children) std::vector<V>().swap(messages[c]);
    if (!is_root) messages[node] = std::move(outgoing);
  }
  return result;
}

}  // namespace detail

// Scalar SumProd over the join, never materializing it.
template <Semiring S>
typename S::Value eval_sumprod(const JoinPlan& plan, const SumProdQuery<typename S::Value>& q,
                               const S& s) {
  auto rows = detail::evaluate_root_rows(plan, q, s);
  auto total = s.zero();
  for (const auto& v : rows) s.plus_assign(total, v);
  return total;
}

template <Semiring S>
typename S::Value eval_sumprod(const Database& db, const JoinTree& tree,
                               const SumProdQuery<typename S::Value>& q, const S& s) {
  return eval_sumprod(JoinPlan(db, tree), q, s);
}

// Grouped SumProd: one value per row of `group_table`, which must be the
// plan's root. Rows without a join extension map to zero.
template <Semiring S>
GroupedResult<typename S::Value> eval_sumprod_grouped(const JoinPlan& plan,
                                                      std::size_t group_table,
                                                      const SumProdQuery<typename S::Value>& q,
                                                      const S& s) {
  if (group_table >= plan.database().num_tables()) {
    throw QueryError("group table " + std::to_string(group_table) + " not in schema");
  }
  if (plan.root_table() != group_table) {
    throw QueryError("grouped query requires the plan to be rooted at table '" +
                     plan.database().table(group_table).name() + "'");
  }
  return detail::evaluate_root_rows(plan, q, s);
}

// Direct fold over a materialized design matrix; the differential-testing
// oracle for the evaluators above.
template <Semiring S>
typename S::Value eval_bruteforce(const DesignMatrix& dm, const Database& schema,
                                  const SumProdQuery<typename S::Value>& q, const S& s) {
  detail::validate_query(schema, q);
  auto total = s.zero();
  std::vector<double> projected;
  for (std::size_t r = 0; r < dm.num_rows(); ++r) {
    const auto row = dm.row(r);
    if (!q.constraints.admits_row(row)) continue;
    auto value = s.one();
    for (const auto& [t, fn] : q.table_factors) {
      if (!fn) continue;
      projected.clear();
      for (const auto f : schema.column_features(t)) projected.push_back(row[f]);
      value = s.times(value, fn(projected));
    }
    for (const auto& [f, fn] : q.feature_factors) {
      if (fn) value = s.times(value, fn(row[f]));
    }
    s.plus_assign(total, value);
  }
  return total;
}

}  // namespace relboost

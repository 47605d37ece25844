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
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "relboost/constraints.hpp"
#include "relboost/database.hpp"
#include "relboost/hypergraph.hpp"
#include "relboost/sketch.hpp"
#include "relboost/split_search.hpp"
#include "relboost/sumprod.hpp"
#include "relboost/tree_model.hpp"

namespace relboost {

enum class TrainMode { kExact, kSketch };

struct TrainConfig {
  std::size_t max_leaves = 8;
  std::size_t max_depth = 64;
  double min_node = 1.0;
  TrainMode mode = TrainMode::kExact;
  double epsilon = 0.5;
  double delta = 0.1;
  std::optional<std::size_t> sketch_width;  // default from epsilon, delta, tau
  std::uint64_t seed = 0;
  bool count_queries = true;
  std::size_t num_trees = 1;
  double shrinkage = 1.0;  // per-tree multiplier

  // Throws ConfigError.
  void validate() const;
  std::size_t width_for(std::size_t num_tables) const;

  // Keys: max_leaves, max_depth, min_node, mode ("exact"|"sketch"), epsilon,
  // delta, k, seed, count_queries, trees, shrinkage. Unknown keys and bad
  // values throw ConfigError.
  static TrainConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

// Grouped SumProd tallies by phase.
struct QueryTally {
  std::uint64_t stats = 0;      // count / label / label-square queries
  std::uint64_t leaf_sums = 0;  // one leaf of one prior tree
  std::uint64_t pair_sums = 0;  // one leaf pair of two prior trees
  std::uint64_t sketches = 0;   // polynomial-semiring queries

  std::uint64_t total() const { return stats + leaf_sums + pair_sums + sketches; }
  QueryTally& operator+=(const QueryTally& o) {
    stats += o.stats;
    leaf_sums += o.leaf_sums;
    pair_sums += o.pair_sums;
    sketches += o.sketches;
    return *this;
  }
  friend bool operator==(const QueryTally&, const QueryTally&) = default;
};

// Everything the relational trainer needs about an acyclic database: one
// compiled join plan per possible grouping table, the sketch domain index
// and the split candidates. Throws CyclicSchemaError for cyclic schemas and
// SchemaError when no label is configured.
class RelationalContext {
 public:
  explicit RelationalContext(const Database& db);

  const Database& database() const { return *db_; }
  std::size_t num_tables() const { return db_->num_tables(); }
  const JoinPlan& plan(std::size_t group_table) const { return plans_[group_table]; }
  const DomainIndex& domain() const { return domain_; }
  const std::vector<SplitFeature>& split_features() const { return split_features_; }
  FeatureId label() const { return label_; }

 private:
  const Database* db_;
  std::vector<JoinPlan> plans_;
  DomainIndex domain_;
  std::vector<SplitFeature> split_features_;
  FeatureId label_;
};

// Per-row sufficient statistics of one grouping table for node v.
struct NodeStats {
  std::vector<double> count;
  std::vector<double> label_sum;
  std::vector<double> label_sq_sum;
};

struct ResidualStats {
  std::vector<double> count;
  std::vector<double> residual_sum;
  std::vector<double> residual_sq_sum;
  std::vector<double> label_sq_sum;  // scale for tie tolerance
};

struct SketchedResidualStats {
  std::vector<double> count;
  std::vector<double> residual_sum;
  std::vector<SketchVector> sketches;
};

// Three grouped queries: count, label sum, label-square sum over rho ⋈ J^(v).
NodeStats node_statistics(const RelationalContext& ctx, const ConstraintSet& node,
                          std::size_t group_table, QueryTally* tally = nullptr);

std::optional<SplitChoice> best_split_single(const RelationalContext& ctx,
                                             const std::vector<NodeStats>& per_table,
                                             double min_node);

enum class LeafWeight { kPrediction, kPredictionSquared, kLabelWeighted };

// One grouped query per leaf of `tree` over J^(leaf) ∩ J^(node), weighted by
// the leaf output d, d^2 or d * label; summed over leaves.
std::vector<double> leaf_sum_queries(const RelationalContext& ctx, const ConstraintSet& node,
                                     const RegressionTree& tree, std::size_t group_table,
                                     LeafWeight weight, QueryTally* tally = nullptr);

// Per row: sum over x of yhat_i(x) * yhat_j(x), one query per leaf pair.
std::vector<double> cross_pair_sums(const RelationalContext& ctx, const ConstraintSet& node,
                                    const RegressionTree& tree_i, const RegressionTree& tree_j,
                                    std::size_t group_table, QueryTally* tally = nullptr);

// Per row: sum over x of r_x^2 via
//   u - 2 sum_t sum_x y yhat_t + sum_t sum_x yhat_t^2 + sum_{t != t'} sum_x yhat_t yhat_t'.
std::vector<double> residual_sq_exact(const RelationalContext& ctx, const ConstraintSet& node,
                                      const Ensemble& prior, std::size_t group_table,
                                      QueryTally* tally = nullptr);

// Count, residual sum and residual-square sum for the exact boosted path;
// 3 + 2 * sum(L_t) + sum_{t != t'} L_t L_t' queries.
ResidualStats residual_statistics(const RelationalContext& ctx, const ConstraintSet& node,
                                  const Ensemble& prior, std::size_t group_table,
                                  QueryTally* tally = nullptr);

std::optional<SplitChoice> best_split_boosted(const RelationalContext& ctx,
                                              const std::vector<ResidualStats>& per_table,
                                              double min_node);

// Per row: Y'(rho) - sum_t Yhat'_t(rho), the sketch of the residual vector
// restricted to rho ⋈ J^(v). 1 + sum(L_t) polynomial-semiring queries.
std::vector<SketchVector> sketch_residual_vectors(const RelationalContext& ctx,
                                                  const ConstraintSet& node, const Ensemble& prior,
                                                  std::size_t group_table,
                                                  const TensorSketch& sketch,
                                                  QueryTally* tally = nullptr);

// Count and residual sums (exact) plus residual sketches for one table.
SketchedResidualStats sketched_residual_statistics(const RelationalContext& ctx,
                                                   const ConstraintSet& node,
                                                   const Ensemble& prior, std::size_t group_table,
                                                   const TensorSketch& sketch,
                                                   QueryTally* tally = nullptr);

std::optional<SplitChoice> best_split_sketched(const RelationalContext& ctx,
                                               const std::vector<SketchedResidualStats>& per_table,
                                               std::size_t width, double min_node);

// One evaluated node during training.
struct NodeRecord {
  std::size_t tree = 0;
  std::size_t node = 0;
  std::vector<std::size_t> prior_leaf_counts;
  TrainMode mode = TrainMode::kExact;
  QueryTally tally;
  RegionStats totals;  // over J^(v); sum_sq estimated in sketch mode
  std::optional<SplitChoice> split;
};

struct TrainReport {
  std::vector<NodeRecord> nodes;
  QueryTally total() const;
};

// Result of evaluating one node: its totals and, if worthwhile, a split.
struct NodeEvaluation {
  RegionStats totals;
  std::optional<SplitChoice> split;
};

using NodeEvaluator =
    std::function<NodeEvaluation(const RegressionTree& tree, std::size_t node,
                                 const ConstraintSet& path)>;

// Breadth-first growth until max_leaves leaves, max_depth, or no node can
// be split. Children predict the mean target of their side of the split.
RegressionTree grow_tree(const TrainConfig& config, const NodeEvaluator& evaluate);

// Single tree on labels, all statistics from grouped queries.
RegressionTree train_tree(const RelationalContext& ctx, const TrainConfig& config,
                          TrainReport* report = nullptr);

// Tree `tree_index` of a boosted ensemble, fitting the residuals of `prior`.
RegressionTree train_next_tree(const RelationalContext& ctx, const TrainConfig& config,
                               const Ensemble& prior, TrainReport* report = nullptr);

Ensemble train_boosted(const RelationalContext& ctx, const TrainConfig& config,
                       std::size_t num_trees, TrainReport* report = nullptr);

// Closed-form query counts per evaluated node, per table.
QueryTally expected_tally(TrainMode mode, const std::vector<std::size_t>& prior_leaf_counts,
                          std::size_t num_tables);

}  // namespace relboost

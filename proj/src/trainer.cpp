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

#include "relboost/trainer.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <utility>

#include "relboost/error.hpp"
#include "relboost/semiring.hpp"

namespace relboost {

using nlohmann::json;

// ---------------------------------------------------------------- config

void TrainConfig::validate() const {
  if (max_leaves < 1) throw ConfigError("max_leaves must be at least 1");
  if (!(min_node >= 0.0) || !std::isfinite(min_node)) {
    throw ConfigError("min_node must be a non-negative number");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (sketch_width && *sketch_width < 1) throw ConfigError("k must be at least 1");
  if (num_trees < 1) throw ConfigError("trees must be at least 1");
  if (!(shrinkage > 0.0) || !std::isfinite(shrinkage)) {
    throw ConfigError("shrinkage must be a positive number");
  }
}

std::size_t TrainConfig::width_for(std::size_t num_tables) const {
  return sketch_width ? *sketch_width : default_sketch_width(num_tables, epsilon, delta);
}

namespace {

std::uint64_t get_unsigned(const json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) throw ConfigError(std::string(key) + " must not be negative");
  throw ConfigError(std::string(key) + " must be a non-negative integer");
}

double get_number(const json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (!v.is_number()) throw ConfigError(std::string(key) + " must be a number");
  return v.get<double>();
}

}  // namespace

TrainConfig TrainConfig::from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("training config must be a JSON object");
  static const char* const kKeys[] = {"max_leaves", "max_depth", "min_node", "mode",
                                      "epsilon",    "delta",     "k",        "seed",
                                      "count_queries", "trees",  "shrinkage"};
  for (const auto& [key, value] : doc.items()) {
    bool known = false;
    for (const auto* k : kKeys) known = known || key == k;
    if (!known) throw ConfigError("unknown config key '" + key + "'");
  }
  TrainConfig c;
  if (doc.contains("max_leaves")) c.max_leaves = get_unsigned(doc, "max_leaves");
  if (doc.contains("max_depth")) c.max_depth = get_unsigned(doc, "max_depth");
  if (doc.contains("min_node")) c.min_node = get_number(doc, "min_node");
  if (doc.contains("mode")) {
    const auto& m = doc.at("mode");
    if (m == "exact") {
      c.mode = TrainMode::kExact;
    } else if (m == "sketch") {
      c.mode = TrainMode::kSketch;
    } else {
      throw ConfigError("mode must be \"exact\" or \"sketch\"");
    }
  }
  if (doc.contains("epsilon")) c.epsilon = get_number(doc, "epsilon");
  if (doc.contains("delta")) c.delta = get_number(doc, "delta");
  if (doc.contains("k") && !doc.at("k").is_null()) c.sketch_width = get_unsigned(doc, "k");
  if (doc.contains("seed")) c.seed = get_unsigned(doc, "seed");
  if (doc.contains("count_queries")) {
    if (!doc.at("count_queries").is_boolean()) throw ConfigError("count_queries must be a boolean");
    c.count_queries = doc.at("count_queries").get<bool>();
  }
  if (doc.contains("trees")) c.num_trees = get_unsigned(doc, "trees");
  if (doc.contains("shrinkage")) c.shrinkage = get_number(doc, "shrinkage");
  c.validate();
  return c;
}

json TrainConfig::to_json() const {
  json doc = {{"max_leaves", max_leaves},
              {"max_depth", max_depth},
              {"min_node", min_node},
              {"mode", mode == TrainMode::kExact ? "exact" : "sketch"},
              {"epsilon", epsilon},
              {"delta", delta},
              {"seed", seed},
              {"count_queries", count_queries},
              {"trees", num_trees},
              {"shrinkage", shrinkage}};
  if (sketch_width) doc["k"] = *sketch_width;
  return doc;
}

// ---------------------------------------------------------------- context

RelationalContext::RelationalContext(const Database& db)
    : db_(&db), domain_(db), split_features_(enumerate_split_features(db)) {
  if (!db.label_feature()) throw SchemaError("training requires a label column");
  label_ = *db.label_feature();
  plans_.reserve(db.num_tables());
  for (std::size_t t = 0; t < db.num_tables(); ++t) plans_.push_back(make_plan(db, t));
}

QueryTally TrainReport::total() const {
  QueryTally t;
  for (const auto& n : nodes) t += n.tally;
  return t;
}

// ---------------------------------------------------------------- queries

namespace {

enum class Phase { kStats, kLeaf, kPair, kSketch };

void count(QueryTally* tally, Phase phase) {
  if (!tally) return;
  switch (phase) {
    case Phase::kStats: ++tally->stats; break;
    case Phase::kLeaf: ++tally->leaf_sums; break;
    case Phase::kPair: ++tally->pair_sums; break;
    case Phase::kSketch: ++tally->sketches; break;
  }
}

// Grouped real query: count (power 0), label sum (1) or label-square sum (2).
std::vector<double> label_moment(const RelationalContext& ctx, const ConstraintSet& gates,
                                 std::size_t group_table, int power, QueryTally* tally,
                                 Phase phase) {
  SumProdQuery<double> q;
  q.constraints = gates;
  if (power == 1) {
    q.feature_factors[ctx.label()] = [](double y) { return y; };
  } else if (power == 2) {
    q.feature_factors[ctx.label()] = [](double y) { return y * y; };
  }
  count(tally, phase);
  return eval_sumprod_grouped(ctx.plan(group_table), group_table, q, RealSemiring{});
}

void axpy(std::vector<double>& acc, double a, const std::vector<double>& x) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += a * x[i];
}

// Per leaf of `tree`: the grouped count or label sum over J^(leaf) ∩ J^(v).
std::vector<std::vector<double>> per_leaf(const RelationalContext& ctx, const ConstraintSet& node,
                                          const RegressionTree& tree, std::size_t group_table,
                                          int power, QueryTally* tally) {
  std::vector<std::vector<double>> out;
  for (const auto leaf : tree.leaves()) {
    out.push_back(label_moment(ctx, node.intersect(tree.path_constraints(leaf)), group_table,
                               power, tally, Phase::kLeaf));
  }
  return out;
}

std::size_t rows_of(const RelationalContext& ctx, std::size_t t) {
  return ctx.database().table(t).num_rows();
}

}  // namespace

NodeStats node_statistics(const RelationalContext& ctx, const ConstraintSet& node,
                          std::size_t group_table, QueryTally* tally) {
  NodeStats s;
  s.count = label_moment(ctx, node, group_table, 0, tally, Phase::kStats);
  s.label_sum = label_moment(ctx, node, group_table, 1, tally, Phase::kStats);
  s.label_sq_sum = label_moment(ctx, node, group_table, 2, tally, Phase::kStats);
  return s;
}

std::vector<double> leaf_sum_queries(const RelationalContext& ctx, const ConstraintSet& node,
                                     const RegressionTree& tree, std::size_t group_table,
                                     LeafWeight weight, QueryTally* tally) {
  std::vector<double> out(rows_of(ctx, group_table), 0.0);
  const int power = weight == LeafWeight::kLabelWeighted ? 1 : 0;
  const auto leaves = tree.leaves();
  const auto sums = per_leaf(ctx, node, tree, group_table, power, tally);
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const double d = tree.leaf_output(leaves[i]);
    axpy(out, weight == LeafWeight::kPredictionSquared ? d * d : d, sums[i]);
  }
  return out;
}

std::vector<double> cross_pair_sums(const RelationalContext& ctx, const ConstraintSet& node,
                                    const RegressionTree& tree_i, const RegressionTree& tree_j,
                                    std::size_t group_table, QueryTally* tally) {
  std::vector<double> out(rows_of(ctx, group_table), 0.0);
  for (const auto li : tree_i.leaves()) {
    const auto gate_i = node.intersect(tree_i.path_constraints(li));
    for (const auto lj : tree_j.leaves()) {
      const auto counts = label_moment(ctx, gate_i.intersect(tree_j.path_constraints(lj)),
                                       group_table, 0, tally, Phase::kPair);
      axpy(out, tree_i.leaf_output(li) * tree_j.leaf_output(lj), counts);
    }
  }
  return out;
}

namespace {

// The pieces of the residual expansion for one grouping table.
struct ResidualParts {
  std::vector<double> label_sq;
  std::vector<double> cross_label;  // sum_t sum_x y * yhat_t
  std::vector<double> pred;         // sum_t sum_x yhat_t
  std::vector<double> pred_sq;      // sum_t sum_x yhat_t^2
  std::vector<double> pairs;        // sum_{t != t'} sum_x yhat_t * yhat_t'
};

// Leaf counts give both sum yhat_t (d * count) and sum yhat_t^2 (d^2 * count)
// so the squared predictions need no queries of their own.
ResidualParts residual_parts(const RelationalContext& ctx, const ConstraintSet& node,
                             const Ensemble& prior, std::size_t group_table, QueryTally* tally) {
  const auto rows = rows_of(ctx, group_table);
  ResidualParts p;
  p.label_sq = label_moment(ctx, node, group_table, 2, tally, Phase::kStats);
  p.cross_label.assign(rows, 0.0);
  p.pred.assign(rows, 0.0);
  p.pred_sq.assign(rows, 0.0);
  p.pairs.assign(rows, 0.0);
  for (const auto& tree : prior.trees) {
    const auto leaves = tree.leaves();
    const auto counts = per_leaf(ctx, node, tree, group_table, 0, tally);
    const auto labels = per_leaf(ctx, node, tree, group_table, 1, tally);
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      const double d = tree.leaf_output(leaves[i]);
      axpy(p.pred, d, counts[i]);
      axpy(p.pred_sq, d * d, counts[i]);
      axpy(p.cross_label, d, labels[i]);
    }
  }
  for (std::size_t i = 0; i < prior.trees.size(); ++i) {
    for (std::size_t j = 0; j < prior.trees.size(); ++j) {
      if (i == j) continue;
      axpy(p.pairs, 1.0,
           cross_pair_sums(ctx, node, prior.trees[i], prior.trees[j], group_table, tally));
    }
  }
  return p;
}

std::vector<double> assemble_residual_sq(const ResidualParts& p) {
  std::vector<double> out(p.label_sq.size());
  for (std::size_t r = 0; r < out.size(); ++r) {
    out[r] = p.label_sq[r] - 2.0 * p.cross_label[r] + p.pred_sq[r] + p.pairs[r];
  }
  return out;
}

}  // namespace

std::vector<double> residual_sq_exact(const RelationalContext& ctx, const ConstraintSet& node,
                                      const Ensemble& prior, std::size_t group_table,
                                      QueryTally* tally) {
  return assemble_residual_sq(residual_parts(ctx, node, prior, group_table, tally));
}

ResidualStats residual_statistics(const RelationalContext& ctx, const ConstraintSet& node,
                                  const Ensemble& prior, std::size_t group_table,
                                  QueryTally* tally) {
  ResidualStats s;
  s.count = label_moment(ctx, node, group_table, 0, tally, Phase::kStats);
  s.residual_sum = label_moment(ctx, node, group_table, 1, tally, Phase::kStats);
  const auto parts = residual_parts(ctx, node, prior, group_table, tally);
  for (std::size_t r = 0; r < s.residual_sum.size(); ++r) s.residual_sum[r] -= parts.pred[r];
  s.residual_sq_sum = assemble_residual_sq(parts);
  s.label_sq_sum = parts.label_sq;
  return s;
}

namespace {

RegionStats table_totals(const std::vector<double>& n, const std::vector<double>& s,
                         const std::vector<double>& u) {
  RegionStats t;
  for (std::size_t r = 0; r < n.size(); ++r) t += {n[r], s[r], u[r]};
  return t;
}

double column_sum(const std::vector<double>& v) {
  double acc = 0.0;
  for (const auto x : v) acc += x;
  return acc;
}

std::size_t totals_table(const RelationalContext& ctx) {
  return *ctx.database().label_table();
}

}  // namespace

std::optional<SplitChoice> best_split_boosted(const RelationalContext& ctx,
                                              const std::vector<ResidualStats>& per_table,
                                              double min_node) {
  const auto& home = per_table[totals_table(ctx)];
  const auto parent = table_totals(home.count, home.residual_sum, home.residual_sq_sum);
  const auto tol = split_tolerance(column_sum(home.label_sq_sum));
  SplitSelector selector(tol);
  for (const auto& sf : ctx.split_features()) {
    const auto& stats = per_table[sf.table];
    const auto& table = ctx.database().table(sf.table);
    const auto c = *ctx.database().column_of(sf.table, sf.feature);
    std::vector<FeatureEntry> entries(table.num_rows());
    for (std::size_t r = 0; r < table.num_rows(); ++r) {
      entries[r] = {table.at(r, c),
                    {stats.count[r], stats.residual_sum[r], stats.residual_sq_sum[r]}};
    }
    scan_feature(sf, std::move(entries), min_node, selector);
  }
  return accept_split(selector.best(), parent, tol);
}

std::optional<SplitChoice> best_split_single(const RelationalContext& ctx,
                                             const std::vector<NodeStats>& per_table,
                                             double min_node) {
  std::vector<ResidualStats> as_residual;
  as_residual.reserve(per_table.size());
  for (const auto& s : per_table) {
    as_residual.push_back({s.count, s.label_sum, s.label_sq_sum, s.label_sq_sum});
  }
  return best_split_boosted(ctx, as_residual, min_node);
}

// ---------------------------------------------------------------- sketches

namespace {

std::vector<SketchVector> sketch_query(const RelationalContext& ctx, const ConstraintSet& gates,
                                       std::size_t group_table, const TensorSketch& sketch,
                                       bool label_weighted, QueryTally* tally) {
  const auto& db = ctx.database();
  SumProdQuery<SketchVector> q;
  q.constraints = gates;
  for (std::size_t t = 0; t < db.num_tables(); ++t) {
    q.table_factors[t] = [t, &ctx, &sketch](std::span<const double> row) {
      return table_factor_monomial(t, row, ctx.domain(), sketch);
    };
  }
  const SketchSemiring ring(sketch.width());
  if (label_weighted) {
    q.feature_factors[ctx.label()] = [&ring](double y) { return ring.lift(y); };
  }
  count(tally, Phase::kSketch);
  return eval_sumprod_grouped(ctx.plan(group_table), group_table, q, ring);
}

void sub_scaled(std::vector<SketchVector>& acc, double a, const std::vector<SketchVector>& x) {
  for (std::size_t r = 0; r < acc.size(); ++r) {
    for (std::size_t i = 0; i < acc[r].size(); ++i) acc[r][i] -= a * x[r][i];
  }
}

}  // namespace

std::vector<SketchVector> sketch_residual_vectors(const RelationalContext& ctx,
                                                  const ConstraintSet& node, const Ensemble& prior,
                                                  std::size_t group_table,
                                                  const TensorSketch& sketch, QueryTally* tally) {
  auto out = sketch_query(ctx, node, group_table, sketch, true, tally);
  for (const auto& tree : prior.trees) {
    for (const auto leaf : tree.leaves()) {
      const auto part = sketch_query(ctx, node.intersect(tree.path_constraints(leaf)),
                                     group_table, sketch, false, tally);
      sub_scaled(out, tree.leaf_output(leaf), part);
    }
  }
  return out;
}

SketchedResidualStats sketched_residual_statistics(const RelationalContext& ctx,
                                                   const ConstraintSet& node,
                                                   const Ensemble& prior, std::size_t group_table,
                                                   const TensorSketch& sketch,
                                                   QueryTally* tally) {
  SketchedResidualStats s;
  s.count = label_moment(ctx, node, group_table, 0, tally, Phase::kStats);
  s.residual_sum = label_moment(ctx, node, group_table, 1, tally, Phase::kStats);
  for (const auto& tree : prior.trees) {
    const auto leaves = tree.leaves();
    const auto counts = per_leaf(ctx, node, tree, group_table, 0, tally);
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      axpy(s.residual_sum, -tree.leaf_output(leaves[i]), counts[i]);
    }
  }
  s.sketches = sketch_residual_vectors(ctx, node, prior, group_table, sketch, tally);
  return s;
}

namespace {

RegionStats sketched_totals(const SketchedResidualStats& s, std::size_t width) {
  SketchVector total(width, 0.0);
  RegionStats t;
  for (std::size_t r = 0; r < s.count.size(); ++r) {
    t.count += s.count[r];
    t.sum += s.residual_sum[r];
    for (std::size_t i = 0; i < width; ++i) total[i] += s.sketches[r][i];
  }
  t.sum_sq = sketch_norm_sq(total);
  return t;
}

}  // namespace

std::optional<SplitChoice> best_split_sketched(const RelationalContext& ctx,
                                               const std::vector<SketchedResidualStats>& per_table,
                                               std::size_t width, double min_node) {
  const auto parent = sketched_totals(per_table[totals_table(ctx)], width);
  const auto tol = split_tolerance(parent.sum_sq);
  SplitSelector selector(tol);
  for (const auto& sf : ctx.split_features()) {
    const auto& stats = per_table[sf.table];
    const auto& table = ctx.database().table(sf.table);
    const auto c = *ctx.database().column_of(sf.table, sf.feature);
    std::vector<SketchedEntry> entries(table.num_rows());
    for (std::size_t r = 0; r < table.num_rows(); ++r) {
      entries[r] = {table.at(r, c), stats.count[r], stats.residual_sum[r], &stats.sketches[r]};
    }
    scan_feature_sketched(sf, std::move(entries), width, min_node, selector);
  }
  return accept_split(selector.best(), parent, tol);
}

// ---------------------------------------------------------------- growth

RegressionTree grow_tree(const TrainConfig& config, const NodeEvaluator& evaluate) {
  RegressionTree tree;
  std::deque<std::size_t> frontier{0};
  while (!frontier.empty()) {
    const auto node = frontier.front();
    frontier.pop_front();
    const bool is_root = node == 0;
    const bool can_split =
        tree.num_leaves() < config.max_leaves && tree.node(node).depth < config.max_depth;
    // The root is always evaluated: its statistics give the tree's value.
    if (!is_root && !can_split) continue;
    const auto eval = evaluate(tree, node, tree.path_constraints(node));
    if (is_root) tree = RegressionTree(eval.totals.mean());
    if (!can_split || !eval.split) continue;
    const auto& s = *eval.split;
    const auto [l, r] = tree.split(node, SplitCriterion{s.feature, s.feature_name, s.threshold, s.table},
                                   s.left.mean(), s.right.mean());
    frontier.push_back(l);
    frontier.push_back(r);
  }
  tree.set_multiplier(config.shrinkage);
  return tree;
}

namespace {

std::vector<std::size_t> leaf_counts(const Ensemble& prior) {
  std::vector<std::size_t> out;
  for (const auto& t : prior.trees) out.push_back(t.num_leaves());
  return out;
}

Ensemble empty_ensemble(const RelationalContext& ctx) {
  Ensemble e;
  e.label = ctx.database().label_name();
  e.features = ctx.database().features();
  return e;
}

}  // namespace

RegressionTree train_tree(const RelationalContext& ctx, const TrainConfig& config,
                          TrainReport* report) {
  return train_next_tree(ctx, config, empty_ensemble(ctx), report);
}

RegressionTree train_next_tree(const RelationalContext& ctx, const TrainConfig& config,
                               const Ensemble& prior, TrainReport* report) {
  config.validate();
  const auto tree_index = prior.trees.size();
  const auto tau = ctx.num_tables();
  // The first tree fits labels, whose squares are available exactly.
  const auto mode = prior.trees.empty() ? TrainMode::kExact : config.mode;
  const auto width = config.width_for(tau);

  const NodeEvaluator evaluate = [&](const RegressionTree&, std::size_t node,
                                     const ConstraintSet& path) {
    NodeRecord record;
    record.tree = tree_index;
    record.node = node;
    record.prior_leaf_counts = leaf_counts(prior);
    record.mode = mode;
    QueryTally* tally = config.count_queries ? &record.tally : nullptr;
    NodeEvaluation out;
    const auto home = totals_table(ctx);
    if (mode == TrainMode::kExact) {
      std::vector<ResidualStats> per_table;
      for (std::size_t t = 0; t < tau; ++t) {
        if (prior.trees.empty()) {
          const auto s = node_statistics(ctx, path, t, tally);
          per_table.push_back({s.count, s.label_sum, s.label_sq_sum, s.label_sq_sum});
        } else {
          per_table.push_back(residual_statistics(ctx, path, prior, t, tally));
        }
      }
      const auto& h = per_table[home];
      out.totals = table_totals(h.count, h.residual_sum, h.residual_sq_sum);
      out.split = best_split_boosted(ctx, per_table, config.min_node);
    } else {
      const TensorSketch sketch(width, tau, mix_seed(mix_seed(config.seed, tree_index), node));
      std::vector<SketchedResidualStats> per_table;
      for (std::size_t t = 0; t < tau; ++t) {
        per_table.push_back(sketched_residual_statistics(ctx, path, prior, t, sketch, tally));
      }
      out.totals = sketched_totals(per_table[home], width);
      out.split = best_split_sketched(ctx, per_table, width, config.min_node);
    }
    record.totals = out.totals;
    record.split = out.split;
    if (report) report->nodes.push_back(std::move(record));
    return out;
  };
  return grow_tree(config, evaluate);
}

Ensemble train_boosted(const RelationalContext& ctx, const TrainConfig& config,
                       std::size_t num_trees, TrainReport* report) {
  if (num_trees < 1) throw ConfigError("at least one tree is required");
  auto ensemble = empty_ensemble(ctx);
  for (std::size_t i = 0; i < num_trees; ++i) {
    ensemble.trees.push_back(train_next_tree(ctx, config, ensemble, report));
  }
  return ensemble;
}

QueryTally expected_tally(TrainMode mode, const std::vector<std::size_t>& prior_leaf_counts,
                          std::size_t num_tables) {
  std::uint64_t leaves = 0, pairs = 0;
  for (std::size_t i = 0; i < prior_leaf_counts.size(); ++i) {
    leaves += prior_leaf_counts[i];
    for (std::size_t j = 0; j < prior_leaf_counts.size(); ++j) {
      if (i != j) pairs += std::uint64_t{prior_leaf_counts[i]} * prior_leaf_counts[j];
    }
  }
  const std::uint64_t tau = num_tables;
  QueryTally t;
  if (prior_leaf_counts.empty() || mode == TrainMode::kExact) {
    t.stats = 3 * tau;
    t.leaf_sums = 2 * leaves * tau;
    t.pair_sums = pairs * tau;
  } else {
    t.stats = 2 * tau;
    t.leaf_sums = leaves * tau;
    t.sketches = (leaves + 1) * tau;
  }
  return t;
}

}  // namespace relboost

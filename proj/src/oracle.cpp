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

#include "relboost/oracle.hpp"

#include <chrono>

#include "relboost/error.hpp"

namespace relboost {

namespace {

std::size_t label_column(const DesignMatrix& dm) {
  if (!dm.label_index()) throw SchemaError("design matrix has no label column");
  return *dm.label_index();
}

Ensemble empty_ensemble(const DesignMatrix& dm) {
  Ensemble e;
  e.label = dm.columns()[label_column(dm)];
  e.features = dm.columns();
  return e;
}

OracleNodeRecord evaluate_node(const DesignMatrix& dm, const std::vector<SplitFeature>& features,
                               const std::vector<double>& residuals, const ConstraintSet& path,
                               double min_node, bool record_candidates) {
  const auto label = label_column(dm);
  OracleNodeRecord record;
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < dm.num_rows(); ++r) {
    if (!path.admits_row(dm.row(r))) continue;
    rows.push_back(r);
    const double y = dm.row(r)[label];
    const double res = residuals[r];
    record.totals += {1.0, res, res * res};
    record.label_sq += y * y;
  }
  record.rows = rows.size();

  const auto tol = split_tolerance(record.label_sq);
  SplitSelector selector(tol);
  if (record_candidates) selector.record_to(&record.candidates);
  for (const auto& sf : features) {
    std::vector<FeatureEntry> entries;
    entries.reserve(rows.size());
    for (const auto r : rows) {
      const double res = residuals[r];
      entries.push_back({dm.row(r)[sf.feature], {1.0, res, res * res}});
    }
    scan_feature(sf, std::move(entries), min_node, selector);
  }
  record.split = accept_split(selector.best(), record.totals, tol);
  return record;
}

RegressionTree grow_oracle_tree(const Database& schema, const DesignMatrix& dm,
                                const TrainConfig& config, const Ensemble& prior,
                                OracleReport* report) {
  const auto features = enumerate_split_features(schema);
  const auto residuals = residual_vector(dm, prior);
  const auto tree_index = prior.trees.size();

  const NodeEvaluator evaluate = [&](const RegressionTree&, std::size_t node,
                                     const ConstraintSet& path) {
    auto record = evaluate_node(dm, features, residuals, path, config.min_node,
                                report != nullptr);
    record.tree = tree_index;
    record.node = node;
    NodeEvaluation out{record.totals, record.split};
    if (report) report->nodes.push_back(std::move(record));
    return out;
  };
  return grow_tree(config, evaluate);
}

}  // namespace

OracleNodeRecord oracle_evaluate_node(const Database& schema, const DesignMatrix& dm,
                                      const Ensemble& prior, const ConstraintSet& path,
                                      double min_node, bool record_candidates) {
  return evaluate_node(dm, enumerate_split_features(schema), residual_vector(dm, prior),
                       path, min_node, record_candidates);
}

double split_true_sse(const DesignMatrix& dm, const Ensemble& prior, const ConstraintSet& path,
                      FeatureId feature, double threshold) {
  const auto residuals = residual_vector(dm, prior);
  RegionStats left, right;
  for (std::size_t r = 0; r < dm.num_rows(); ++r) {
    const auto row = dm.row(r);
    if (!path.admits_row(row)) continue;
    const double res = residuals[r];
    (row[feature] >= threshold ? right : left) += {1.0, res, res * res};
  }
  return left.sse() + right.sse();
}

RegressionTree train_tree_oracle(const Database& schema, const DesignMatrix& dm,
                                 const TrainConfig& config, OracleReport* report) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  auto tree = grow_oracle_tree(schema, dm, config, empty_ensemble(dm), report);
  if (report) {
    report->wall_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return tree;
}

Ensemble train_boosted_oracle(const Database& schema, const DesignMatrix& dm,
                              const TrainConfig& config, std::size_t num_trees,
                              OracleReport* report) {
  config.validate();
  if (num_trees < 1) throw ConfigError("at least one tree is required");
  const auto start = std::chrono::steady_clock::now();
  auto ensemble = empty_ensemble(dm);
  for (std::size_t i = 0; i < num_trees; ++i) {
    ensemble.trees.push_back(grow_oracle_tree(schema, dm, config, ensemble, report));
  }
  if (report) {
    report->wall_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return ensemble;
}

std::vector<double> residual_vector(const DesignMatrix& dm, const Ensemble& ensemble) {
  const auto label = label_column(dm);
  std::vector<double> out(dm.num_rows());
  for (std::size_t r = 0; r < dm.num_rows(); ++r) {
    out[r] = residual(ensemble, dm.row(r), dm.row(r)[label]);
  }
  return out;
}

double ssr_oracle(const DesignMatrix& dm, const Ensemble& ensemble, const ConstraintSet& node) {
  const auto label = label_column(dm);
  double acc = 0.0;
  for (std::size_t r = 0; r < dm.num_rows(); ++r) {
    const auto row = dm.row(r);
    if (!node.admits_row(row)) continue;
    const double res = residual(ensemble, row, row[label]);
    acc += res * res;
  }
  return acc;
}

SketchVector direct_residual_sketch(const Database& schema, const DesignMatrix& dm,
                                    const Ensemble& ensemble, const ConstraintSet& node,
                                    const DomainIndex& index, const TensorSketch& sketch) {
  const auto label = label_column(dm);
  SketchVector out(sketch.width(), 0.0);
  std::vector<std::size_t> indices(schema.num_tables());
  for (std::size_t r = 0; r < dm.num_rows(); ++r) {
    const auto row = dm.row(r);
    if (!node.admits_row(row)) continue;
    for (std::size_t t = 0; t < schema.num_tables(); ++t) {
      indices[t] = index.index_of_join_row(t, row);
    }
    const auto [bucket, sign] = sketch.kronecker_term(indices);
    out[bucket] += sign * residual(ensemble, row, row[label]);
  }
  return out;
}

}  // namespace relboost

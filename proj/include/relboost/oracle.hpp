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
#include <vector>

#include "relboost/constraints.hpp"
#include "relboost/database.hpp"
#include "relboost/design_matrix.hpp"
#include "relboost/sketch.hpp"
#include "relboost/split_search.hpp"
#include "relboost/trainer.hpp"
#include "relboost/tree_model.hpp"

namespace relboost {

// Reference trainers over the materialized join. They share the split
// conventions of the relational trainer (thresholds, objective, tie-break)
// but compute every statistic by scanning design-matrix rows.

struct OracleNodeRecord {
  std::size_t tree = 0;
  std::size_t node = 0;
  std::size_t rows = 0;  // |J^(v)|
  RegionStats totals;    // over residuals
  double label_sq = 0.0;
  std::vector<SplitChoice> candidates;
  std::optional<SplitChoice> split;
};

struct OracleReport {
  std::vector<OracleNodeRecord> nodes;
  double wall_seconds = 0.0;
};

// Exact statistics and best split of the node with path `path`, fitting the
// residuals of `prior`. Candidates are recorded when `record_candidates`.
OracleNodeRecord oracle_evaluate_node(const Database& schema, const DesignMatrix& dm,
                                      const Ensemble& prior, const ConstraintSet& path,
                                      double min_node, bool record_candidates = false);

// True total SSE of the residuals of `prior` when the node region is cut
// at (feature >= threshold).
double split_true_sse(const DesignMatrix& dm, const Ensemble& prior, const ConstraintSet& path,
                      FeatureId feature, double threshold);

// `schema` supplies feature ownership and threshold candidates; `dm` must
// be its materialized join.
RegressionTree train_tree_oracle(const Database& schema, const DesignMatrix& dm,
                                 const TrainConfig& config, OracleReport* report = nullptr);

Ensemble train_boosted_oracle(const Database& schema, const DesignMatrix& dm,
                              const TrainConfig& config, std::size_t num_trees,
                              OracleReport* report = nullptr);

// Sum over rows admitted by `node` of (label - ensemble prediction)^2.
double ssr_oracle(const DesignMatrix& dm, const Ensemble& ensemble, const ConstraintSet& node);

// Residual of every design-matrix row under `ensemble`.
std::vector<double> residual_vector(const DesignMatrix& dm, const Ensemble& ensemble);

// Sketch of the residual vector restricted to rows admitted by `node`,
// built row by row from each row's Kronecker index.
SketchVector direct_residual_sketch(const Database& schema, const DesignMatrix& dm,
                                    const Ensemble& ensemble, const ConstraintSet& node,
                                    const DomainIndex& index, const TensorSketch& sketch);

}  // namespace relboost

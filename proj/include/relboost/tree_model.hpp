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

#include "relboost/constraints.hpp"
#include "relboost/database.hpp"

namespace relboost {

// Rows with x[feature] >= threshold go right, the rest go left.
struct SplitCriterion {
  FeatureId feature = 0;
  std::string feature_name;
  double threshold = 0.0;
  std::size_t table = 0;  // table owning the feature

  friend bool operator==(const SplitCriterion&, const SplitCriterion&) = default;
};

class RegressionTree {
 public:
  struct Node {
    std::optional<SplitCriterion> split;
    std::size_t left = 0;
    std::size_t right = 0;
    std::optional<std::size_t> parent;
    std::size_t depth = 0;
    // Leaf prediction; on internal nodes the mean of the region before the
    // split, kept for reporting only.
    double value = 0.0;

    bool is_leaf() const { return !split.has_value(); }
  };

  // A single leaf predicting `value`.
  explicit RegressionTree(double value = 0.0);

  // Turns leaf `node` into an internal node; children are appended as
  // (left, right) and their ids returned.
  std::pair<std::size_t, std::size_t> split(std::size_t node, SplitCriterion criterion,
                                            double left_value, double right_value);

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(std::size_t i) const { return nodes_[i]; }
  std::size_t num_leaves() const;
  std::vector<std::size_t> leaves() const;

  // Multiplier applied to every leaf value (shrinkage); 1 unless configured.
  double multiplier() const { return multiplier_; }
  void set_multiplier(double m) { multiplier_ = m; }
  double leaf_output(std::size_t leaf) const { return multiplier_ * nodes_[leaf].value; }

  // Conjunction of criteria from the root to `node`, one interval per
  // feature.
  ConstraintSet path_constraints(std::size_t node) const;

  // Leaf reached by a row indexed by feature id. Throws SchemaError if the
  // row lacks a referenced feature.
  std::size_t route(std::span<const double> row) const;

  // Assembles a tree from raw nodes (used by deserialization); checks the
  // structure and throws ParseError on inconsistencies.
  static RegressionTree from_nodes(std::vector<Node> nodes, double multiplier);

  friend bool operator==(const RegressionTree& a, const RegressionTree& b);

 private:
  std::vector<Node> nodes_;
  double multiplier_ = 1.0;
};

double predict_tree(const RegressionTree& tree, std::span<const double> row);

// The additive model: prediction is the sum over member trees.
struct Ensemble {
  std::vector<RegressionTree> trees;
  std::string label;
  std::vector<std::string> features;  // feature id -> name

  friend bool operator==(const Ensemble&, const Ensemble&) = default;
};

double predict_ensemble(const Ensemble& e, std::span<const double> row);
double residual(const Ensemble& e, std::span<const double> row, double label);

inline constexpr int kModelVersion = 1;

// Versioned JSON document; doubles are written in shortest round-trip form
// so thresholds and leaf values survive bit-exactly.
std::string serialize(const Ensemble& e);
// Throws VersionError for an unknown version, ParseError for malformed
// documents.
Ensemble deserialize(const std::string& document);

// Structural comparison with a tolerance on leaf values only: features,
// tables, thresholds and shape must match exactly. Returns a description of
// the first difference.
std::optional<std::string> compare_trees(const RegressionTree& a, const RegressionTree& b,
                                         double leaf_tolerance);
std::optional<std::string> compare_ensembles(const Ensemble& a, const Ensemble& b,
                                             double leaf_tolerance);

}  // namespace relboost

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

#include "relboost/tree_model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <json.hpp>

#include "relboost/error.hpp"

namespace relboost {

RegressionTree::RegressionTree(double value) {
  Node root;
  root.value = value;
  nodes_.push_back(root);
}

std::pair<std::size_t, std::size_t> RegressionTree::split(std::size_t node,
                                                          SplitCriterion criterion,
                                                          double left_value, double right_value) {
  if (node >= nodes_.size() || !nodes_[node].is_leaf()) {
    throw SchemaError("can only split an existing leaf");
  }
  const auto depth = nodes_[node].depth + 1;
  Node left, right;
  left.parent = right.parent = node;
  left.depth = right.depth = depth;
  left.value = left_value;
  right.value = right_value;
  const auto l = nodes_.size();
  nodes_.push_back(left);
  nodes_.push_back(right);
  nodes_[node].split = std::move(criterion);
  nodes_[node].left = l;
  nodes_[node].right = l + 1;
  return {l, l + 1};
}

std::size_t RegressionTree::num_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

std::vector<std::size_t> RegressionTree::leaves() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].is_leaf()) out.push_back(i);
  }
  return out;
}

ConstraintSet RegressionTree::path_constraints(std::size_t node) const {
  ConstraintSet out;
  auto child = node;
  while (nodes_[child].parent) {
    const auto parent = *nodes_[child].parent;
    const auto& c = *nodes_[parent].split;
    if (nodes_[parent].right == child) {
      out.require_at_least(c.feature, c.threshold);
    } else {
      out.require_below(c.feature, c.threshold);
    }
    child = parent;
  }
  return out;
}

std::size_t RegressionTree::route(std::span<const double> row) const {
  std::size_t node = 0;
  while (!nodes_[node].is_leaf()) {
    const auto& c = *nodes_[node].split;
    if (c.feature >= row.size()) {
      throw SchemaError("row lacks feature '" + c.feature_name + "'");
    }
    node = row[c.feature] >= c.threshold ? nodes_[node].right : nodes_[node].left;
  }
  return node;
}

RegressionTree RegressionTree::from_nodes(std::vector<Node> nodes, double multiplier) {
  if (nodes.empty()) throw ParseError("tree without nodes", 0, 0);
  std::vector<int> parents(nodes.size(), 0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_leaf()) continue;
    for (const auto c : {nodes[i].left, nodes[i].right}) {
      if (c == 0 || c >= nodes.size()) throw ParseError("child index out of range", 0, 0);
      if (++parents[c] > 1) throw ParseError("node has two parents", 0, 0);
    }
    if (nodes[i].left == nodes[i].right) throw ParseError("left and right child coincide", 0, 0);
  }
  // Rebuild parent links and depths top-down; unreachable nodes are errors.
  std::vector<bool> reached(nodes.size(), false);
  std::deque<std::size_t> queue{0};
  reached[0] = true;
  nodes[0].parent.reset();
  nodes[0].depth = 0;
  while (!queue.empty()) {
    const auto i = queue.front();
    queue.pop_front();
    if (nodes[i].is_leaf()) continue;
    for (const auto c : {nodes[i].left, nodes[i].right}) {
      reached[c] = true;
      nodes[c].parent = i;
      nodes[c].depth = nodes[i].depth + 1;
      queue.push_back(c);
    }
  }
  if (std::find(reached.begin(), reached.end(), false) != reached.end()) {
    throw ParseError("tree has unreachable nodes", 0, 0);
  }
  RegressionTree tree;
  tree.nodes_ = std::move(nodes);
  tree.multiplier_ = multiplier;
  return tree;
}

bool operator==(const RegressionTree& a, const RegressionTree& b) {
  return !compare_trees(a, b, 0.0).has_value();
}

double predict_tree(const RegressionTree& tree, std::span<const double> row) {
  return tree.leaf_output(tree.route(row));
}

double predict_ensemble(const Ensemble& e, std::span<const double> row) {
  double total = 0.0;
  for (const auto& tree : e.trees) total += predict_tree(tree, row);
  return total;
}

double residual(const Ensemble& e, std::span<const double> row, double label) {
  return label - predict_ensemble(e, row);
}

std::string serialize(const Ensemble& e) {
  using nlohmann::json;
  json doc;
  doc["version"] = kModelVersion;
  doc["label"] = e.label;
  doc["features"] = e.features;
  json trees = json::array();
  for (const auto& tree : e.trees) {
    json nodes = json::array();
    for (const auto& n : tree.nodes()) {
      if (n.is_leaf()) {
        nodes.push_back({{"leaf", n.value}});
      } else {
        nodes.push_back({{"feature", n.split->feature_name},
                         {"threshold", n.split->threshold},
                         {"table", n.split->table},
                         {"left", n.left},
                         {"right", n.right}});
      }
    }
    json t = {{"nodes", std::move(nodes)}};
    if (tree.multiplier() != 1.0) t["multiplier"] = tree.multiplier();
    trees.push_back(std::move(t));
  }
  doc["trees"] = std::move(trees);
  return doc.dump(2) + "\n";
}

Ensemble deserialize(const std::string& document) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& ex) {
    throw ParseError(std::string("malformed model document: ") + ex.what(), 0, ex.byte);
  }
  try {
    if (!doc.contains("version")) throw ParseError("model document lacks a version", 0, 0);
    const auto version = doc.at("version").get<int>();
    if (version != kModelVersion) {
      throw VersionError("unsupported model version " + std::to_string(version) +
                         " (expected " + std::to_string(kModelVersion) + ")");
    }
    Ensemble e;
    e.label = doc.value("label", std::string());
    e.features = doc.value("features", std::vector<std::string>());
    for (const auto& t : doc.at("trees")) {
      std::vector<RegressionTree::Node> nodes;
      for (const auto& jn : t.at("nodes")) {
        RegressionTree::Node n;
        if (jn.contains("leaf")) {
          n.value = jn.at("leaf").get<double>();
        } else {
          SplitCriterion c;
          c.feature_name = jn.at("feature").get<std::string>();
          const auto it = std::find(e.features.begin(), e.features.end(), c.feature_name);
          if (it == e.features.end()) {
            throw ParseError("split on undeclared feature '" + c.feature_name + "'", 0, 0);
          }
          c.feature = static_cast<FeatureId>(it - e.features.begin());
          c.threshold = jn.at("threshold").get<double>();
          c.table = jn.value("table", std::size_t{0});
          n.split = std::move(c);
          n.left = jn.at("left").get<std::size_t>();
          n.right = jn.at("right").get<std::size_t>();
        }
        nodes.push_back(std::move(n));
      }
      e.trees.push_back(RegressionTree::from_nodes(std::move(nodes), t.value("multiplier", 1.0)));
    }
    return e;
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed model document: ") + ex.what(), 0, 0);
  }
}

std::optional<std::string> compare_trees(const RegressionTree& a, const RegressionTree& b,
                                         double leaf_tolerance) {
  if (a.nodes().size() != b.nodes().size()) {
    return "node count " + std::to_string(a.nodes().size()) + " vs " +
           std::to_string(b.nodes().size());
  }
  if (a.multiplier() != b.multiplier()) return "multiplier differs";
  for (std::size_t i = 0; i < a.nodes().size(); ++i) {
    const auto& x = a.node(i);
    const auto& y = b.node(i);
    const auto where = "node " + std::to_string(i) + ": ";
    if (x.is_leaf() != y.is_leaf()) return where + "leaf/internal mismatch";
    if (x.is_leaf()) {
      const double scale = std::max({1.0, std::abs(x.value), std::abs(y.value)});
      if (!(std::abs(x.value - y.value) <= leaf_tolerance * scale)) {
        return where + "leaf value differs";
      }
      continue;
    }
    if (x.split->feature != y.split->feature || x.split->feature_name != y.split->feature_name) {
      return where + "feature " + x.split->feature_name + " vs " + y.split->feature_name;
    }
    if (x.split->table != y.split->table) return where + "owning table differs";
    if (x.split->threshold != y.split->threshold) return where + "threshold differs";
    if (x.left != y.left || x.right != y.right) return where + "children differ";
  }
  return std::nullopt;
}

std::optional<std::string> compare_ensembles(const Ensemble& a, const Ensemble& b,
                                             double leaf_tolerance) {
  if (a.trees.size() != b.trees.size()) {
    return "tree count " + std::to_string(a.trees.size()) + " vs " +
           std::to_string(b.trees.size());
  }
  for (std::size_t t = 0; t < a.trees.size(); ++t) {
    if (auto d = compare_trees(a.trees[t], b.trees[t], leaf_tolerance)) {
      return "tree " + std::to_string(t) + ", " + *d;
    }
  }
  return std::nullopt;
}

}  // namespace relboost

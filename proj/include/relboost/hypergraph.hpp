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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relboost/table.hpp"

namespace relboost {

// Vertices are feature names; hyperedge i holds the (sorted) vertex ids of
// table i's columns.
struct JoinHypergraph {
  std::vector<std::string> vertices;
  std::vector<std::string> edge_names;
  std::vector<std::vector<std::size_t>> edges;

  std::string describe_edge(std::size_t e) const;
};

// Throws SchemaError on an empty table list.
JoinHypergraph build_hypergraph(std::span<const Table> tables);

// One application of a GYO reduction rule.
struct ReductionStep {
  enum class Rule {
    kRemoveSoloColumn,      // vertex appears in exactly one remaining edge
    kRemoveContainedTable,  // edge is a subset of another remaining edge
    kRemoveLastTable,       // final, empty edge
  };
  Rule rule;
  std::size_t edge;
  std::optional<std::size_t> vertex;     // kRemoveSoloColumn
  std::optional<std::size_t> container;  // kRemoveContainedTable

  std::string describe(const JoinHypergraph& h) const;
};

struct AcyclicityResult {
  bool acyclic = false;
  std::vector<ReductionStep> trace;
  // Edges left when no rule applies (empty when acyclic), with the vertices
  // that survived reduction.
  std::vector<std::size_t> residual_edges;
  std::vector<std::vector<std::size_t>> residual_vertices;

  std::string describe_residual(const JoinHypergraph& h) const;
};

// GYO reduction with deterministic rule order: solo columns first, then
// contained tables, lowest declaration index first.
AcyclicityResult check_acyclic(const JoinHypergraph& h);

// Same reduction, but `pick(n)` chooses which of the n currently applicable
// rule instances fires next. The verdict does not depend on the choices.
AcyclicityResult check_acyclic(const JoinHypergraph& h,
                               const std::function<std::size_t(std::size_t)>& pick);

// One bag per input table; node i holds table i.
struct JoinTree {
  struct Node {
    std::size_t table = 0;
    std::vector<std::size_t> bag;
    std::optional<std::size_t> parent;
    std::vector<std::size_t> children;
  };
  std::vector<Node> nodes;
  std::size_t root = 0;

  // Children before parents; the root is last.
  std::vector<std::size_t> postorder() const;
  std::string render(const JoinHypergraph& h) const;
};

// Parent links come from the containment steps of the GYO trace. Throws
// CyclicSchemaError naming the residual hypergraph for cyclic input and
// SchemaError for an out-of-range root.
JoinTree build_join_tree(const JoinHypergraph& h, std::size_t root_table);

// Same bags and undirected edges, rooted at `root_table`.
JoinTree reroot(const JoinTree& tree, std::size_t root_table);

// Empty when `tree` is a valid join tree of `h` (connected, every hyperedge
// covered by a bag, running intersection); otherwise the first violation.
std::optional<std::string> validate_join_tree(const JoinHypergraph& h, const JoinTree& tree);

}  // namespace relboost

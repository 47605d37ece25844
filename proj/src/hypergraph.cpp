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

#include "relboost/hypergraph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "relboost/error.hpp"

namespace relboost {

namespace {

std::string render_vertex_set(const JoinHypergraph& h, const std::vector<std::size_t>& vs) {
  std::string out = "(";
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ",";
    out += h.vertices[vs[i]];
  }
  return out + ")";
}

struct GyoState {
  std::vector<bool> active;
  std::vector<std::vector<std::size_t>> vertices;  // sorted, reduced

  explicit GyoState(const JoinHypergraph& h)
      : active(h.edges.size(), true), vertices(h.edges) {}

  std::vector<ReductionStep> applicable(std::size_t num_vertices) const {
    std::vector<ReductionStep> out;
    std::vector<std::size_t> count(num_vertices, 0);
    std::size_t live = 0;
    for (std::size_t e = 0; e < vertices.size(); ++e) {
      if (!active[e]) continue;
      ++live;
      for (auto v : vertices[e]) ++count[v];
    }
    for (std::size_t e = 0; e < vertices.size(); ++e) {
      if (!active[e]) continue;
      for (auto v : vertices[e]) {
        if (count[v] == 1) {
          out.push_back({ReductionStep::Rule::kRemoveSoloColumn, e, v, std::nullopt});
        }
      }
    }
    for (std::size_t e = 0; e < vertices.size(); ++e) {
      if (!active[e]) continue;
      for (std::size_t f = 0; f < vertices.size(); ++f) {
        if (f == e || !active[f]) continue;
        if (std::includes(vertices[f].begin(), vertices[f].end(), vertices[e].begin(),
                          vertices[e].end())) {
          out.push_back({ReductionStep::Rule::kRemoveContainedTable, e, std::nullopt, f});
        }
      }
    }
    if (live == 1) {
      for (std::size_t e = 0; e < vertices.size(); ++e) {
        if (active[e] && vertices[e].empty()) {
          out.push_back({ReductionStep::Rule::kRemoveLastTable, e, std::nullopt, std::nullopt});
        }
      }
    }
    return out;
  }

  void apply(const ReductionStep& step) {
    if (step.rule == ReductionStep::Rule::kRemoveSoloColumn) {
      auto& vs = vertices[step.edge];
      vs.erase(std::find(vs.begin(), vs.end(), *step.vertex));
    } else {
      active[step.edge] = false;
    }
  }
};

}  // namespace

std::string JoinHypergraph::describe_edge(std::size_t e) const {
  return edge_names[e] + render_vertex_set(*this, edges[e]);
}

JoinHypergraph build_hypergraph(std::span<const Table> tables) {
  if (tables.empty()) throw SchemaError("join hypergraph needs at least one table");
  JoinHypergraph h;
  std::map<std::string, std::size_t> ids;
  for (const auto& table : tables) {
    std::vector<std::size_t> edge;
    for (const auto& column : table.columns()) {
      auto [it, fresh] = ids.emplace(column, h.vertices.size());
      if (fresh) h.vertices.push_back(column);
      edge.push_back(it->second);
    }
    std::sort(edge.begin(), edge.end());
    h.edge_names.push_back(table.name());
    h.edges.push_back(std::move(edge));
  }
  return h;
}

std::string ReductionStep::describe(const JoinHypergraph& h) const {
  switch (rule) {
    case Rule::kRemoveSoloColumn:
      return "remove column " + h.vertices[*vertex] + " (only in " + h.edge_names[edge] + ")";
    case Rule::kRemoveContainedTable:
      return "remove table " + h.edge_names[edge] + " (contained in " +
             h.edge_names[*container] + ")";
    case Rule::kRemoveLastTable:
      return "remove table " + h.edge_names[edge] + " (empty)";
  }
  return {};
}

std::string AcyclicityResult::describe_residual(const JoinHypergraph& h) const {
  std::string out;
  for (std::size_t i = 0; i < residual_edges.size(); ++i) {
    if (i) out += ", ";
    out += h.edge_names[residual_edges[i]] + render_vertex_set(h, residual_vertices[i]);
  }
  return out;
}

AcyclicityResult check_acyclic(const JoinHypergraph& h,
                               const std::function<std::size_t(std::size_t)>& pick) {
  GyoState state(h);
  AcyclicityResult result;
  while (true) {
    const auto options = state.applicable(h.vertices.size());
    if (options.empty()) break;
    const std::size_t chosen = pick(options.size());
    const auto& step = options.at(chosen);
    state.apply(step);
    result.trace.push_back(step);
  }
  for (std::size_t e = 0; e < h.edges.size(); ++e) {
    if (state.active[e]) {
      result.residual_edges.push_back(e);
      result.residual_vertices.push_back(state.vertices[e]);
    }
  }
  result.acyclic = result.residual_edges.empty();
  return result;
}

AcyclicityResult check_acyclic(const JoinHypergraph& h) {
  return check_acyclic(h, [](std::size_t) { return std::size_t{0}; });
}

std::vector<std::size_t> JoinTree::postorder() const {
  std::vector<std::size_t> order;
  order.reserve(nodes.size());
  // Iterative DFS; children visited in stored order.
  std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < nodes[node].children.size()) {
      const auto child = nodes[node].children[next++];
      stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;
}

std::string JoinTree::render(const JoinHypergraph& h) const {
  std::ostringstream out;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
  while (!stack.empty()) {
    const auto [node, depth] = stack.back();
    stack.pop_back();
    out << std::string(depth * 2, ' ') << h.describe_edge(nodes[node].table) << "\n";
    const auto& ch = nodes[node].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.emplace_back(*it, depth + 1);
  }
  return out.str();
}

JoinTree reroot(const JoinTree& tree, std::size_t root_table) {
  if (root_table >= tree.nodes.size()) {
    throw SchemaError("join tree root " + std::to_string(root_table) + " out of range");
  }
  std::vector<std::vector<std::size_t>> adjacent(tree.nodes.size());
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].parent) {
      adjacent[i].push_back(*tree.nodes[i].parent);
      adjacent[*tree.nodes[i].parent].push_back(i);
    }
  }
  for (auto& a : adjacent) std::sort(a.begin(), a.end());

  JoinTree out;
  out.nodes.resize(tree.nodes.size());
  out.root = root_table;
  std::vector<bool> seen(tree.nodes.size(), false);
  std::deque<std::size_t> queue{root_table};
  seen[root_table] = true;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    out.nodes[i].table = tree.nodes[i].table;
    out.nodes[i].bag = tree.nodes[i].bag;
  }
  while (!queue.empty()) {
    const auto node = queue.front();
    queue.pop_front();
    for (auto next : adjacent[node]) {
      if (seen[next]) continue;
      seen[next] = true;
      out.nodes[next].parent = node;
      out.nodes[node].children.push_back(next);
      queue.push_back(next);
    }
  }
  return out;
}

JoinTree build_join_tree(const JoinHypergraph& h, std::size_t root_table) {
  if (root_table >= h.edges.size()) {
    throw SchemaError("root table index " + std::to_string(root_table) + " out of range");
  }
  const auto verdict = check_acyclic(h);
  if (!verdict.acyclic) {
    throw CyclicSchemaError("cyclic join schema; residual hypergraph: " +
                            verdict.describe_residual(h));
  }
  JoinTree gyo;
  gyo.nodes.resize(h.edges.size());
  for (std::size_t e = 0; e < h.edges.size(); ++e) {
    gyo.nodes[e].table = e;
    gyo.nodes[e].bag = h.edges[e];
  }
  // Each containment step links an eliminated edge to its container; the
  // last edge standing is the GYO root.
  for (const auto& step : verdict.trace) {
    if (step.rule == ReductionStep::Rule::kRemoveContainedTable) {
      gyo.nodes[step.edge].parent = *step.container;
    } else if (step.rule == ReductionStep::Rule::kRemoveLastTable) {
      gyo.root = step.edge;
    }
  }
  for (std::size_t e = 0; e < h.edges.size(); ++e) {
    if (gyo.nodes[e].parent) gyo.nodes[*gyo.nodes[e].parent].children.push_back(e);
  }
  auto tree = reroot(gyo, root_table);
  if (auto problem = validate_join_tree(h, tree)) {
    throw SchemaError("internal: constructed join tree is invalid: " + *problem);
  }
  return tree;
}

std::optional<std::string> validate_join_tree(const JoinHypergraph& h, const JoinTree& tree) {
  const auto n = tree.nodes.size();
  if (n != h.edges.size()) return "node count differs from table count";
  if (tree.root >= n) return "root out of range";
  if (tree.nodes[tree.root].parent) return "root has a parent";
  // Connectivity and acyclicity of the parent structure.
  std::vector<bool> seen(n, false);
  std::size_t visited = 0;
  std::deque<std::size_t> queue{tree.root};
  seen[tree.root] = true;
  while (!queue.empty()) {
    const auto node = queue.front();
    queue.pop_front();
    ++visited;
    for (auto c : tree.nodes[node].children) {
      if (c >= n || seen[c]) return "node reached twice or out of range";
      if (tree.nodes[c].parent != node) return "child/parent links disagree";
      seen[c] = true;
      queue.push_back(c);
    }
  }
  if (visited != n) return "tree is not connected";
  for (std::size_t e = 0; e < h.edges.size(); ++e) {
    bool covered = false;
    for (const auto& node : tree.nodes) {
      if (std::includes(node.bag.begin(), node.bag.end(), h.edges[e].begin(), h.edges[e].end())) {
        covered = true;
        break;
      }
    }
    if (!covered) return "table " + h.edge_names[e] + " is not covered by any bag";
  }
  // Running intersection: nodes holding v form a connected subtree, i.e.
  // exactly one of them has a parent that lacks v.
  for (std::size_t v = 0; v < h.vertices.size(); ++v) {
    std::size_t tops = 0;
    for (const auto& node : tree.nodes) {
      if (!std::binary_search(node.bag.begin(), node.bag.end(), v)) continue;
      if (!node.parent) {
        ++tops;
        continue;
      }
      const auto& pb = tree.nodes[*node.parent].bag;
      if (!std::binary_search(pb.begin(), pb.end(), v)) ++tops;
    }
    if (tops > 1) return "running intersection violated for " + h.vertices[v];
  }
  return std::nullopt;
}

}  // namespace relboost

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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "random_instance.hpp"
#include "relboost/design_matrix.hpp"
#include "relboost/error.hpp"
#include "relboost/tree_model.hpp"

namespace relboost {
namespace {

RegressionTree stump(double threshold, double left, double right) {
  RegressionTree t;
  t.split(0, SplitCriterion{0, "f", threshold, 0}, left, right);
  return t;
}

TEST(PredictTree, SingleLeaf) {
  const RegressionTree t(7.0);
  const std::vector<double> row{123.0};
  EXPECT_EQ(predict_tree(t, row), 7.0);
}

TEST(PredictTree, BoundaryRoutesRight) {
  const auto t = stump(2.0, 1.0, 9.0);
  EXPECT_EQ(predict_tree(t, std::vector<double>{2.0}), 9.0);
  EXPECT_EQ(predict_tree(t, std::vector<double>{1.999}), 1.0);
}

TEST(PredictTree, MissingFeatureIsSchemaError) {
  RegressionTree t;
  t.split(0, SplitCriterion{3, "g", 0.0, 0}, 0.0, 1.0);
  EXPECT_THROW(predict_tree(t, std::vector<double>{1.0}), SchemaError);
}

// Independent recursive walk used as the reference.
double walk(const RegressionTree& t, std::size_t node, std::span<const double> row) {
  const auto& n = t.node(node);
  if (n.is_leaf()) return t.leaf_output(node);
  return walk(t, row[n.split->feature] >= n.split->threshold ? n.right : n.left, row);
}

TEST(PredictTree, DepthTwoMatchesRecursiveWalk) {
  RegressionTree t;
  const auto [l, r] = t.split(0, SplitCriterion{0, "a", 0.5, 0}, 0, 0);
  t.split(l, SplitCriterion{1, "b", -0.2, 0}, 1.0, 2.0);
  t.split(r, SplitCriterion{1, "b", 0.3, 0}, 3.0, 4.0);
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> row{u(rng), u(rng)};
    EXPECT_EQ(predict_tree(t, row), walk(t, 0, row));
  }
}

Ensemble constant_trees(std::vector<double> values) {
  Ensemble e;
  e.features = {"f"};
  for (const auto v : values) e.trees.emplace_back(v);
  return e;
}

TEST(PredictEnsemble, SumsTrees) {
  const std::vector<double> row{0.0};
  EXPECT_EQ(predict_ensemble(constant_trees({1.0, 2.0}), row), 3.0);
  EXPECT_EQ(predict_ensemble(Ensemble{}, row), 0.0);
}

TEST(PredictEnsemble, RandomStumpsMatchPerTreeSum) {
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Ensemble e;
  for (int i = 0; i < 3; ++i) e.trees.push_back(stump(u(rng), u(rng), u(rng)));
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> row{u(rng)};
    double expected = 0.0;
    for (const auto& t : e.trees) expected += walk(t, 0, row);
    EXPECT_DOUBLE_EQ(predict_ensemble(e, row), expected);
    auto reversed = e;
    std::reverse(reversed.trees.begin(), reversed.trees.end());
    EXPECT_DOUBLE_EQ(predict_ensemble(reversed, row), expected);
  }
}

TEST(Residual, LabelMinusPrediction) {
  const std::vector<double> row{0.0};
  EXPECT_EQ(residual(constant_trees({3.0}), row, 5.0), 2.0);
  EXPECT_EQ(residual(Ensemble{}, row, 5.0), 5.0);
}

TEST(Multiplier, ScalesLeafOutput) {
  auto t = stump(0.0, 2.0, 4.0);
  t.set_multiplier(0.5);
  EXPECT_EQ(predict_tree(t, std::vector<double>{1.0}), 2.0);
}

TEST(PathConstraints, RepeatedFeatureIntersected) {
  RegressionTree t;
  const auto [l, r] = t.split(0, SplitCriterion{0, "f", 5.0, 0}, 0, 0);
  (void)l;
  const auto [rl, rr] = t.split(r, SplitCriterion{0, "f", 8.0, 0}, 0, 0);
  (void)rr;
  const auto c = t.path_constraints(rl);
  ASSERT_EQ(c.bounds().size(), 1u);
  EXPECT_EQ(c.bounds().at(0).lower, 5.0);
  EXPECT_EQ(c.bounds().at(0).upper, 8.0);
  EXPECT_TRUE(t.path_constraints(0).unconstrained());
}

// Every row satisfies exactly one leaf's compiled path, that leaf is the
// one routing reaches, and compiled intervals agree with the raw criteria.
TEST(TreeProperty, RoutingPartitionAndIntervalCompilation) {
  std::mt19937_64 rng(63);
  for (int trial = 0; trial < 50; ++trial) {
    const auto db = testing::random_database(rng);
    const auto tree = testing::random_tree(rng, db, 8);
    const auto dm = materialize_join(db);
    std::uniform_real_distribution<double> noise(-0.5, 0.5);
    for (std::size_t r = 0; r < std::min<std::size_t>(dm.num_rows(), 40); ++r) {
      std::vector<double> row(dm.row(r).begin(), dm.row(r).end());
      if (r % 2) {
        for (auto& v : row) v += noise(rng);
      }
      std::size_t satisfied = 0, which = 0;
      for (const auto leaf : tree.leaves()) {
        const bool compiled = tree.path_constraints(leaf).admits_row(row);
        bool raw = true;
        for (auto child = leaf; tree.node(child).parent;) {
          const auto parent = *tree.node(child).parent;
          const auto& s = *tree.node(parent).split;
          const bool right = tree.node(parent).right == child;
          raw = raw && (right ? row[s.feature] >= s.threshold : row[s.feature] < s.threshold);
          child = parent;
        }
        ASSERT_EQ(compiled, raw);
        if (compiled) {
          ++satisfied;
          which = leaf;
        }
      }
      ASSERT_EQ(satisfied, 1u);
      ASSERT_EQ(tree.route(row), which);
    }
  }
}

TEST(Serialize, RoundTripTwoTrees) {
  Ensemble e;
  e.label = "y";
  e.features = {"f", "g", "y"};
  RegressionTree a;
  a.split(0, SplitCriterion{1, "g", 0.1 + 0.2, 1}, 1.0 / 3.0, -2e-300);
  RegressionTree b(std::nextafter(1.0, 2.0));
  b.set_multiplier(0.25);
  e.trees = {a, b};
  const auto doc = serialize(e);
  const auto back = deserialize(doc);
  EXPECT_EQ(back, e);
  EXPECT_EQ(back.trees[0].node(0).split->threshold, 0.1 + 0.2);
  EXPECT_EQ(back.trees[1].node(0).value, std::nextafter(1.0, 2.0));
  EXPECT_EQ(serialize(back), doc);
}

TEST(Serialize, RandomEnsemblesRoundTripBitExactly) {
  std::mt19937_64 rng(64);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int trial = 0; trial < 30; ++trial) {
    const auto db = testing::random_database(rng);
    auto e = testing::random_ensemble(rng, db, 3, 6);
    // Replace thresholds and leaves with full-precision values.
    Ensemble noisy;
    noisy.label = e.label;
    noisy.features = e.features;
    for (const auto& t : e.trees) {
      auto nodes = t.nodes();
      for (auto& n : nodes) {
        n.value = u(rng) / 3.0;
        if (n.split) n.split->threshold = u(rng) / 7.0;
      }
      noisy.trees.push_back(RegressionTree::from_nodes(nodes, 1.0));
    }
    ASSERT_EQ(deserialize(serialize(noisy)), noisy);
  }
}

TEST(Serialize, UnknownVersion) {
  EXPECT_THROW(deserialize(R"({"version": 99, "trees": []})"), VersionError);
}

TEST(Serialize, MalformedDocuments) {
  EXPECT_THROW(deserialize("{"), ParseError);
  EXPECT_THROW(deserialize(R"({"trees": []})"), ParseError);
  EXPECT_THROW(deserialize(R"({"version": 1, "features": ["f"], "trees": [{"nodes": [
      {"feature": "f", "threshold": 1, "left": 1, "right": 5}, {"leaf": 0}]}]})"),
               ParseError);
  EXPECT_THROW(deserialize(R"({"version": 1, "features": [], "trees": [{"nodes": [
      {"feature": "zz", "threshold": 1, "left": 1, "right": 2}, {"leaf": 0}, {"leaf": 1}]}]})"),
               ParseError);
  EXPECT_THROW(deserialize(R"({"version": 1, "trees": [{"nodes": []}]})"), ParseError);
}

TEST(CompareTrees, ReportsFirstDifference) {
  const auto a = stump(1.0, 0.0, 1.0);
  EXPECT_FALSE(compare_trees(a, stump(1.0, 1e-12, 1.0), 1e-9));
  EXPECT_TRUE(compare_trees(a, stump(1.0, 1e-3, 1.0), 1e-9));
  EXPECT_TRUE(compare_trees(a, stump(std::nextafter(1.0, 2.0), 0.0, 1.0), 1e-9));
  EXPECT_TRUE(compare_trees(a, RegressionTree(0.0), 1e-9));
}

}  // namespace
}  // namespace relboost

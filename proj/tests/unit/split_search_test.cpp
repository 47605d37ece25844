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

#include <random>

#include "random_instance.hpp"
#include "relboost/split_search.hpp"

namespace relboost {
namespace {

SplitFeature feature(std::vector<double> thresholds, std::size_t table = 0, FeatureId id = 0) {
  return SplitFeature{table, id, "f" + std::to_string(id), std::move(thresholds)};
}

std::vector<FeatureEntry> labelled(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<FeatureEntry> out;
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back({x[i], {1.0, y[i], y[i] * y[i]}});
  return out;
}

TEST(ScanFeature, ThreeRowExample) {
  SplitSelector sel(split_tolerance(105.0));
  std::vector<SplitChoice> log;
  sel.record_to(&log);
  scan_feature(feature({1, 2, 3}), labelled({1, 2, 3}, {1, 2, 10}), 1.0, sel);
  // Threshold 1 leaves the left side empty and is skipped.
  ASSERT_EQ(log.size(), 2u);
  EXPECT_EQ(log[0].threshold, 2.0);
  EXPECT_DOUBLE_EQ(log[0].objective, 32.0);
  EXPECT_EQ(log[1].threshold, 3.0);
  EXPECT_DOUBLE_EQ(log[1].objective, 0.5);
  ASSERT_TRUE(sel.best());
  EXPECT_EQ(sel.best()->threshold, 3.0);
  EXPECT_DOUBLE_EQ(sel.best()->left.mean(), 1.5);
  EXPECT_DOUBLE_EQ(sel.best()->right.mean(), 10.0);
}

TEST(ScanFeature, ConstantLabelsGiveNoAcceptedSplit) {
  SplitSelector sel(split_tolerance(12.0));
  scan_feature(feature({1, 2, 3}), labelled({1, 2, 3}, {2, 2, 2}), 1.0, sel);
  RegionStats parent{3, 6, 12};
  EXPECT_FALSE(accept_split(sel.best(), parent, split_tolerance(12.0)));
}

TEST(ScanFeature, TieGoesToEarlierFeature) {
  SplitSelector sel(split_tolerance(10.0));
  const auto x = std::vector<double>{1, 2};
  const auto y = std::vector<double>{0, 3};
  scan_feature(feature({1, 2}, 0, 0), labelled(x, y), 1.0, sel);
  scan_feature(feature({5, 6}, 1, 4), labelled({5, 6}, y), 1.0, sel);
  ASSERT_TRUE(sel.best());
  EXPECT_EQ(sel.best()->feature, 0u);
  EXPECT_EQ(sel.offered(), 2u);
}

TEST(ScanFeature, MinNodeSkipsSmallChildren) {
  SplitSelector sel(split_tolerance(1.0));
  scan_feature(feature({1, 2, 3}), labelled({1, 2, 3}, {1, 2, 10}), 2.0, sel);
  EXPECT_FALSE(sel.best());
}

TEST(ScanFeature, WeightedEntriesEqualExpandedRows) {
  // A grouped entry with count 2 behaves like two identical rows.
  std::vector<FeatureEntry> grouped{{1, {2, 4, 8}}, {2, {1, 7, 49}}};
  SplitSelector a(1e-9), b(1e-9);
  scan_feature(feature({1, 2}), grouped, 1.0, a);
  scan_feature(feature({1, 2}), labelled({1, 1, 2}, {2, 2, 7}), 1.0, b);
  ASSERT_TRUE(a.best() && b.best());
  EXPECT_DOUBLE_EQ(a.best()->objective, b.best()->objective);
}

TEST(ApproxResidualSq, PrefixEmptyAndTelescoping) {
  std::mt19937_64 rng(71);
  std::normal_distribution<double> n(0.0, 1.0);
  const std::size_t k = 6;
  std::vector<SketchVector> sketches(5, SketchVector(k));
  for (auto& s : sketches) {
    for (auto& v : s) v = n(rng);
  }
  std::vector<SketchedEntry> entries;
  for (std::size_t i = 0; i < sketches.size(); ++i) {
    entries.push_back({static_cast<double>(i % 3), 1.0, 0.0, &sketches[i]});
  }
  SketchVector total(k, 0.0);
  for (const auto& s : sketches) {
    for (std::size_t i = 0; i < k; ++i) total[i] += s[i];
  }
  const auto out = approx_residual_sq(feature({-1, 0, 1, 2}), entries, k);
  ASSERT_EQ(out.size(), 4u);
  EXPECT_EQ(out[0].left.sum_sq, 0.0);
  EXPECT_EQ(out[0].left.count, 0.0);
  EXPECT_NEAR(out[0].right.sum_sq, sketch_norm_sq(total), 1e-12);
  // Threshold 2 keeps values {0, 1} on the left: rows 0, 1, 3, 4.
  SketchVector left(k, 0.0);
  for (const std::size_t i : {0u, 1u, 3u, 4u}) {
    for (std::size_t j = 0; j < k; ++j) left[j] += sketches[i][j];
  }
  EXPECT_NEAR(out[3].left.sum_sq, sketch_norm_sq(left), 1e-12);
  EXPECT_EQ(out[3].left.count + out[3].right.count, 5.0);
}

TEST(EnumerateSplitFeatures, OwnedNonLabelInTableOrder) {
  const Database db({testing::table_from_text("R", "b,a\n2,1\n1,1\n2,3\n"),
                     testing::table_from_text("S", "a,y,c\n1,0,9\n")},
                    std::string("y"));
  const auto fs = enumerate_split_features(db);
  ASSERT_EQ(fs.size(), 3u);
  EXPECT_EQ(fs[0].name, "b");
  EXPECT_EQ(fs[0].thresholds, (std::vector<double>{1, 2}));
  EXPECT_EQ(fs[1].name, "a");
  EXPECT_EQ(fs[1].thresholds, (std::vector<double>{1, 3}));
  EXPECT_EQ(fs[2].name, "c");
  EXPECT_EQ(fs[2].table, 1u);
}

}  // namespace
}  // namespace relboost

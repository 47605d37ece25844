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

#include "relboost/split_search.hpp"

#include <algorithm>
#include <cmath>

namespace relboost {

std::vector<SplitFeature> enumerate_split_features(const Database& db) {
  std::vector<SplitFeature> out;
  for (std::size_t t = 0; t < db.num_tables(); ++t) {
    const auto& table = db.table(t);
    for (const auto f : db.owned_features(t)) {
      if (db.label_feature() && *db.label_feature() == f) continue;
      SplitFeature sf;
      sf.table = t;
      sf.feature = f;
      sf.name = db.feature_name(f);
      const auto c = *db.column_of(t, f);
      for (std::size_t r = 0; r < table.num_rows(); ++r) sf.thresholds.push_back(table.at(r, c));
      std::sort(sf.thresholds.begin(), sf.thresholds.end());
      sf.thresholds.erase(std::unique(sf.thresholds.begin(), sf.thresholds.end()),
                          sf.thresholds.end());
      out.push_back(std::move(sf));
    }
  }
  return out;
}

void SplitSelector::offer(const SplitChoice& candidate) {
  ++offered_;
  if (log_) log_->push_back(candidate);
  if (!std::isfinite(candidate.objective)) return;
  if (!best_ || candidate.objective < best_->objective - tolerance_) best_ = candidate;
}

double split_tolerance(double magnitude) { return 1e-9 * std::max(1.0, std::abs(magnitude)); }

namespace {

bool admissible(const RegionStats& left, const RegionStats& right, double min_node) {
  return left.count > 0.0 && right.count > 0.0 && left.count >= min_node &&
         right.count >= min_node;
}

}  // namespace

void scan_feature(const SplitFeature& feature, std::vector<FeatureEntry> entries, double min_node,
                  SplitSelector& selector) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const FeatureEntry& a, const FeatureEntry& b) { return a.value < b.value; });
  RegionStats total;
  for (const auto& e : entries) total += e.stats;
  RegionStats left;
  std::size_t next = 0;
  for (const auto alpha : feature.thresholds) {
    while (next < entries.size() && entries[next].value < alpha) left += entries[next++].stats;
    const auto right = total - left;
    if (!admissible(left, right, min_node)) continue;
    SplitChoice c;
    c.table = feature.table;
    c.feature = feature.feature;
    c.feature_name = feature.name;
    c.threshold = alpha;
    c.left = left;
    c.right = right;
    c.objective = left.sse() + right.sse();
    selector.offer(c);
  }
}

std::vector<SketchedThreshold> approx_residual_sq(const SplitFeature& feature,
                                                  std::vector<SketchedEntry> entries,
                                                  std::size_t width) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const SketchedEntry& a, const SketchedEntry& b) { return a.value < b.value; });
  SketchVector total(width, 0.0);
  double total_count = 0.0, total_sum = 0.0;
  for (const auto& e : entries) {
    for (std::size_t i = 0; i < width; ++i) total[i] += (*e.sketch)[i];
    total_count += e.count;
    total_sum += e.sum;
  }
  std::vector<SketchedThreshold> out;
  out.reserve(feature.thresholds.size());
  SketchVector prefix(width, 0.0);
  SketchVector rest(width, 0.0);
  double count = 0.0, sum = 0.0;
  std::size_t next = 0;
  for (const auto alpha : feature.thresholds) {
    while (next < entries.size() && entries[next].value < alpha) {
      const auto& e = entries[next++];
      for (std::size_t i = 0; i < width; ++i) prefix[i] += (*e.sketch)[i];
      count += e.count;
      sum += e.sum;
    }
    for (std::size_t i = 0; i < width; ++i) rest[i] = total[i] - prefix[i];
    SketchedThreshold st;
    st.threshold = alpha;
    st.left = {count, sum, sketch_norm_sq(prefix)};
    st.right = {total_count - count, total_sum - sum, sketch_norm_sq(rest)};
    out.push_back(st);
  }
  return out;
}

void scan_feature_sketched(const SplitFeature& feature, std::vector<SketchedEntry> entries,
                           std::size_t width, double min_node, SplitSelector& selector) {
  for (const auto& st : approx_residual_sq(feature, std::move(entries), width)) {
    if (!admissible(st.left, st.right, min_node)) continue;
    SplitChoice c;
    c.table = feature.table;
    c.feature = feature.feature;
    c.feature_name = feature.name;
    c.threshold = st.threshold;
    c.left = st.left;
    c.right = st.right;
    c.objective = st.left.sse() + st.right.sse();
    selector.offer(c);
  }
}

std::optional<SplitChoice> accept_split(const std::optional<SplitChoice>& best,
                                        const RegionStats& parent, double tolerance) {
  if (!best) return std::nullopt;
  if (!(best->objective < parent.sse() - tolerance)) return std::nullopt;
  return best;
}

}  // namespace relboost

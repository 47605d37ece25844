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

#include "relboost/database.hpp"
#include "relboost/sketch.hpp"

namespace relboost {

// Split conventions shared by the relational trainer and the design-matrix
// oracle: candidate thresholds, the SSE objective, and tie-breaking.

// A feature eligible for splitting: owned by `table` and not the label.
// Thresholds are the distinct values of the owning column, ascending.
struct SplitFeature {
  std::size_t table = 0;
  FeatureId feature = 0;
  std::string name;
  std::vector<double> thresholds;
};

// In (table index, column index) order, which is the tie-break order.
std::vector<SplitFeature> enumerate_split_features(const Database& db);

// Count, sum and sum of squares of a target over a region.
struct RegionStats {
  double count = 0.0;
  double sum = 0.0;
  double sum_sq = 0.0;

  RegionStats& operator+=(const RegionStats& o) {
    count += o.count;
    sum += o.sum;
    sum_sq += o.sum_sq;
    return *this;
  }
  RegionStats operator-(const RegionStats& o) const {
    return {count - o.count, sum - o.sum, sum_sq - o.sum_sq};
  }
  double mean() const { return count > 0.0 ? sum / count : 0.0; }
  // sum_sq - sum^2 / count; zero for an empty region.
  double sse() const { return count > 0.0 ? sum_sq - sum * sum / count : 0.0; }
};

struct SplitChoice {
  std::size_t table = 0;
  FeatureId feature = 0;
  std::string feature_name;
  double threshold = 0.0;
  double objective = 0.0;  // left SSE + right SSE
  RegionStats left;
  RegionStats right;
};

// Keeps the minimum-objective candidate. Candidates must be offered in
// (table, feature, threshold) order; a later candidate replaces the
// incumbent only if it is lower by more than `tolerance`, so near-ties go to
// the lexicographically smallest.
class SplitSelector {
 public:
  explicit SplitSelector(double tolerance) : tolerance_(tolerance) {}

  void offer(const SplitChoice& candidate);
  const std::optional<SplitChoice>& best() const { return best_; }
  std::size_t offered() const { return offered_; }
  // Appends every offered candidate to `log` (may be null).
  void record_to(std::vector<SplitChoice>* log) { log_ = log; }

 private:
  double tolerance_;
  std::optional<SplitChoice> best_;
  std::size_t offered_ = 0;
  std::vector<SplitChoice>* log_ = nullptr;
};

// Objective differences below tolerance_scale * 1e-9 are treated as ties.
double split_tolerance(double magnitude);

// One contribution to a feature scan: the value of the split column and the
// statistics it carries (a grouped row, or a single design-matrix row).
struct FeatureEntry {
  double value = 0.0;
  RegionStats stats;
};

// Evaluates every threshold of `feature` over `entries` (any order; they are
// stably sorted by value). Left = entries with value < threshold; right is
// the complement. Candidates with a child below `min_node` (or empty) are
// skipped.
void scan_feature(const SplitFeature& feature, std::vector<FeatureEntry> entries, double min_node,
                  SplitSelector& selector);

// Sketch-mode counterpart: squared-residual sums of each side are the
// squared norms of prefix and complement sketches.
struct SketchedEntry {
  double value = 0.0;
  double count = 0.0;
  double sum = 0.0;
  const SketchVector* sketch = nullptr;
};

struct SketchedThreshold {
  double threshold = 0.0;
  RegionStats left;   // sum_sq is the sketch estimate
  RegionStats right;  // likewise
};

// Per-threshold left/right estimates for one feature, including thresholds
// whose children are empty.
std::vector<SketchedThreshold> approx_residual_sq(const SplitFeature& feature,
                                                  std::vector<SketchedEntry> entries,
                                                  std::size_t width);

void scan_feature_sketched(const SplitFeature& feature, std::vector<SketchedEntry> entries,
                           std::size_t width, double min_node, SplitSelector& selector);

// The best split if it improves on the parent's SSE by more than `tolerance`.
std::optional<SplitChoice> accept_split(const std::optional<SplitChoice>& best,
                                        const RegionStats& parent, double tolerance);

}  // namespace relboost

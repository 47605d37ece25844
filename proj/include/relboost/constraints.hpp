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

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>

namespace relboost {

// Half-open interval [lower, upper). The default admits every finite value.
struct Interval {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return lower <= x && x < upper; }
  bool empty() const { return !(lower < upper); }
  Interval intersect(const Interval& o) const {
    return {std::max(lower, o.lower), std::min(upper, o.upper)};
  }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Conjunction of per-feature interval predicates. Repeated constraints on a
// feature are intersected into one interval, possibly empty.
class ConstraintSet {
 public:
  void restrict(std::size_t feature, const Interval& interval) {
    auto [it, fresh] = bounds_.emplace(feature, interval);
    if (!fresh) it->second = it->second.intersect(interval);
  }
  // x_f >= threshold
  void require_at_least(std::size_t feature, double threshold) {
    restrict(feature, {threshold, std::numeric_limits<double>::infinity()});
  }
  // x_f < threshold
  void require_below(std::size_t feature, double threshold) {
    restrict(feature, {-std::numeric_limits<double>::infinity(), threshold});
  }

  ConstraintSet intersect(const ConstraintSet& o) const {
    ConstraintSet out = *this;
    for (const auto& [f, iv] : o.bounds_) out.restrict(f, iv);
    return out;
  }

  bool feasible() const {
    return std::none_of(bounds_.begin(), bounds_.end(),
                        [](const auto& kv) { return kv.second.empty(); });
  }
  bool admits(std::size_t feature, double value) const {
    const auto it = bounds_.find(feature);
    return it == bounds_.end() || it->second.contains(value);
  }
  // `row` is indexed by feature id.
  template <class Row>
  bool admits_row(const Row& row) const {
    for (const auto& [f, iv] : bounds_) {
      if (!iv.contains(row[f])) return false;
    }
    return true;
  }

  const std::map<std::size_t, Interval>& bounds() const { return bounds_; }
  bool unconstrained() const { return bounds_.empty(); }
  friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;

 private:
  std::map<std::size_t, Interval> bounds_;
};

}  // namespace relboost

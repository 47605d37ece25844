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

#include "relboost/design_matrix.hpp"

#include <algorithm>
#include <map>

#include "relboost/error.hpp"

namespace relboost {

DesignMatrix::DesignMatrix(std::vector<std::string> columns, std::vector<double> row_major,
                           std::optional<std::size_t> label_index)
    : columns_(std::move(columns)), values_(std::move(row_major)), label_(label_index) {
  num_rows_ = columns_.empty() ? 0 : values_.size() / columns_.size();
}

namespace {

// Depth-first enumeration over tables in a connected order. Each table is
// indexed on the features it shares with tables earlier in the order, so
// partial tuples never need to be stored.
class JoinEnumerator {
 public:
  JoinEnumerator(const Database& db, std::size_t cap) : db_(db), cap_(cap) {
    const auto n = db.num_tables();
    std::vector<bool> placed(n, false);
    std::vector<bool> bound(db.num_features(), false);
    for (std::size_t step = 0; step < n; ++step) {
      std::size_t next = n;
      for (std::size_t t = 0; t < n && next == n; ++t) {
        if (placed[t]) continue;
        for (auto f : db.column_features(t)) {
          if (bound[f]) {
            next = t;
            break;
          }
        }
      }
      if (next == n) {
        for (std::size_t t = 0; t < n; ++t) {
          if (!placed[t]) {
            next = t;
            break;
          }
        }
      }
      placed[next] = true;
      Level level;
      level.table = next;
      for (std::size_t c = 0; c < db.table(next).num_columns(); ++c) {
        const auto f = db.column_features(next)[c];
        if (bound[f]) {
          level.key_columns.push_back(c);
          level.key_features.push_back(f);
        } else {
          level.new_columns.push_back(c);
          level.new_features.push_back(f);
        }
      }
      const auto& table = db.table(next);
      for (std::size_t r = 0; r < table.num_rows(); ++r) {
        std::vector<double> key;
        for (auto c : level.key_columns) key.push_back(table.at(r, c));
        level.index[key].push_back(r);
      }
      for (auto f : level.new_features) bound[f] = true;
      levels_.push_back(std::move(level));
    }
    current_.assign(db.num_features(), 0.0);
  }

  std::vector<double> run() {
    if (!levels_.empty()) descend(0);
    return std::move(out_);
  }

 private:
  struct Level {
    std::size_t table = 0;
    std::vector<std::size_t> key_columns, key_features;
    std::vector<std::size_t> new_columns, new_features;
    std::map<std::vector<double>, std::vector<std::size_t>> index;
  };

  void descend(std::size_t depth) {
    if (depth == levels_.size()) {
      if (++rows_ > cap_) {
        throw ResourceError("join exceeds cap of " + std::to_string(cap_) + " rows");
      }
      out_.insert(out_.end(), current_.begin(), current_.end());
      return;
    }
    const auto& level = levels_[depth];
    std::vector<double> key;
    key.reserve(level.key_features.size());
    for (auto f : level.key_features) key.push_back(current_[f]);
    const auto it = level.index.find(key);
    if (it == level.index.end()) return;
    const auto& table = db_.table(level.table);
    for (auto r : it->second) {
      for (std::size_t i = 0; i < level.new_columns.size(); ++i) {
        current_[level.new_features[i]] = table.at(r, level.new_columns[i]);
      }
      descend(depth + 1);
    }
  }

  const Database& db_;
  std::size_t cap_;
  std::vector<Level> levels_;
  std::vector<double> current_;
  std::vector<double> out_;
  std::size_t rows_ = 0;
};

}  // namespace

DesignMatrix materialize_join(const Database& db, std::size_t cap) {
  auto flat = JoinEnumerator(db, cap).run();
  const auto width = db.num_features();
  const auto n = width == 0 ? 0 : flat.size() / width;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(flat.begin() + a * width, flat.begin() + (a + 1) * width,
                                        flat.begin() + b * width, flat.begin() + (b + 1) * width);
  });
  std::vector<double> sorted;
  sorted.reserve(flat.size());
  for (auto i : order) {
    sorted.insert(sorted.end(), flat.begin() + i * width, flat.begin() + (i + 1) * width);
  }
  return DesignMatrix(db.features(), std::move(sorted), db.label_feature());
}

}  // namespace relboost

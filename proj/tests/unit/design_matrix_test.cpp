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

#include <map>
#include <random>

#include "random_instance.hpp"
#include "relboost/design_matrix.hpp"
#include "relboost/error.hpp"

namespace relboost {
namespace {

using testing::table_from_text;

TEST(MaterializeJoin, SingleMatchKey) {
  const Database db({table_from_text("T1", "a,b\n1,1\n2,1\n"), table_from_text("T2", "b,c\n1,5\n")});
  const auto dm = materialize_join(db);
  EXPECT_EQ(dm.columns(), (std::vector<std::string>{"a", "b", "c"}));
  ASSERT_EQ(dm.num_rows(), 2u);
  EXPECT_EQ(std::vector<double>(dm.row(0).begin(), dm.row(0).end()),
            (std::vector<double>{1, 1, 5}));
  EXPECT_EQ(std::vector<double>(dm.row(1).begin(), dm.row(1).end()),
            (std::vector<double>{2, 1, 5}));
}

TEST(MaterializeJoin, EmptyJoin) {
  const Database db({table_from_text("T1", "a,b\n1,1\n2,1\n"), table_from_text("T2", "b,c\n9,5\n")});
  EXPECT_EQ(materialize_join(db).num_rows(), 0u);
}

TEST(MaterializeJoin, MultiplicityProduct) {
  const Database db({table_from_text("T1", "a,b\n1,1\n2,2\n"),
                     table_from_text("T2", "b,c\n1,1\n1,2\n1,3\n2,4\n2,5\n2,6\n")});
  EXPECT_EQ(materialize_join(db).num_rows(), 6u);
}

TEST(MaterializeJoin, DuplicatesMultiply) {
  const Database db({table_from_text("T1", "a,b\n1,1\n1,1\n"), table_from_text("T2", "b,c\n1,5\n1,5\n")});
  EXPECT_EQ(materialize_join(db).num_rows(), 4u);
}

TEST(MaterializeJoin, CapExceeded) {
  const Database db({table_from_text("T1", "a,b\n1,1\n2,1\n3,1\n"),
                     table_from_text("T2", "b,c\n1,1\n1,2\n1,3\n")});
  EXPECT_THROW(materialize_join(db, 8), ResourceError);
  EXPECT_EQ(materialize_join(db, 9).num_rows(), 9u);
}

TEST(MaterializeJoin, LabelIndexTracksFeature) {
  const Database db({table_from_text("T1", "y,b\n1,1\n")}, std::string("y"));
  EXPECT_EQ(materialize_join(db).label_index(), 0u);
}

// Every row projects onto a row of each table, and each distinct tuple
// appears exactly (product of projection multiplicities) times, checked
// against a nested-loop enumeration of the cross product.
TEST(MaterializeJoinProperty, MatchesNestedLoops) {
  std::mt19937_64 rng(21);
  testing::InstanceOptions o;
  o.max_rows = 8;
  o.max_tables = 3;
  for (int trial = 0; trial < 60; ++trial) {
    const auto db = testing::random_database(rng, o);
    const auto dm = materialize_join(db);

    std::map<std::vector<double>, std::size_t> expected;
    std::vector<std::size_t> pick(db.num_tables(), 0);
    for (;;) {
      std::vector<double> row(db.num_features(), 0.0);
      std::vector<bool> bound(db.num_features(), false);
      bool ok = true;
      for (std::size_t t = 0; t < db.num_tables() && ok; ++t) {
        const auto r = db.table(t).row(pick[t]);
        const auto& fs = db.column_features(t);
        for (std::size_t c = 0; c < fs.size(); ++c) {
          if (bound[fs[c]] && row[fs[c]] != r[c]) {
            ok = false;
            break;
          }
          row[fs[c]] = r[c];
          bound[fs[c]] = true;
        }
      }
      if (ok) ++expected[row];
      std::size_t t = 0;
      while (t < pick.size() && ++pick[t] == db.table(t).num_rows()) pick[t++] = 0;
      if (t == pick.size()) break;
    }
    std::map<std::vector<double>, std::size_t> actual;
    for (std::size_t r = 0; r < dm.num_rows(); ++r) {
      ++actual[std::vector<double>(dm.row(r).begin(), dm.row(r).end())];
      if (r > 0) {
        ASSERT_FALSE(std::lexicographical_compare(dm.row(r).begin(), dm.row(r).end(),
                                                  dm.row(r - 1).begin(), dm.row(r - 1).end()));
      }
    }
    ASSERT_EQ(actual, expected) << "trial " << trial;
  }
}

}  // namespace
}  // namespace relboost

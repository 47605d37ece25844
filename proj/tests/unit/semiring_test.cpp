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

#include <cmath>
#include <random>

#include "relboost/semiring.hpp"
#include "relboost/sketch.hpp"

namespace relboost {
namespace {

bool near(double a, double b, double scale) { return std::abs(a - b) <= 1e-9 * std::max(1.0, scale); }

bool near(const SketchVector& a, const SketchVector& b, double scale) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!near(a[i], b[i], scale)) return false;
  }
  return true;
}

double scale_of(double a) { return std::abs(a); }
double scale_of(const SketchVector& v) {
  double s = 0.0;
  for (const auto x : v) s += std::abs(x);
  return s;
}

template <class S, class Gen>
void check_laws(const S& s, Gen&& gen, int triples) {
  for (int i = 0; i < triples; ++i) {
    const auto a = gen(), b = gen(), c = gen();
    const double sc = (1 + scale_of(a)) * (1 + scale_of(b)) * (1 + scale_of(c));
    ASSERT_TRUE(near(s.plus(s.plus(a, b), c), s.plus(a, s.plus(b, c)), sc));
    ASSERT_TRUE(near(s.plus(a, b), s.plus(b, a), sc));
    ASSERT_TRUE(near(s.times(s.times(a, b), c), s.times(a, s.times(b, c)), sc));
    ASSERT_TRUE(near(s.times(a, b), s.times(b, a), sc));
    ASSERT_TRUE(near(s.times(a, s.plus(b, c)), s.plus(s.times(a, b), s.times(a, c)), sc));
    ASSERT_TRUE(near(s.plus(a, s.zero()), a, sc));
    ASSERT_TRUE(near(s.times(a, s.one()), a, sc));
    ASSERT_TRUE(near(s.times(a, s.zero()), s.zero(), sc));
    auto acc = a;
    s.plus_assign(acc, b);
    ASSERT_TRUE(near(acc, s.plus(a, b), sc));
  }
}

TEST(SemiringLaws, Real) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  check_laws(RealSemiring{}, [&] { return u(rng); }, 1000);
}

TEST(SemiringLaws, Counting) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::uint64_t> u(0, 1000);
  const CountingSemiring s;
  for (int i = 0; i < 1000; ++i) {
    const auto a = u(rng), b = u(rng), c = u(rng);
    ASSERT_EQ(s.plus(s.plus(a, b), c), s.plus(a, s.plus(b, c)));
    ASSERT_EQ(s.times(a, s.plus(b, c)), s.plus(s.times(a, b), s.times(a, c)));
    ASSERT_EQ(s.times(a, s.zero()), 0u);
    ASSERT_EQ(s.times(a, s.one()), a);
  }
}

void sketch_laws(std::size_t k, std::uint64_t seed, int triples) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution sparse(0.2);
  const SketchSemiring s(k);
  check_laws(
      s,
      [&] {
        SketchVector v(k, 0.0);
        // Mix dense and monomial operands so both multiplication paths run.
        const bool monomial = sparse(rng);
        if (monomial) {
          v[std::uniform_int_distribution<std::size_t>(0, k - 1)(rng)] = u(rng);
        } else {
          for (auto& x : v) x = u(rng);
        }
        return v;
      },
      triples);
}

TEST(SemiringLaws, SketchSmallWidths) {
  for (std::size_t k = 1; k <= 10; ++k) sketch_laws(k, 43 + k, 100);
}

TEST(SemiringLaws, SketchFftWidth) { sketch_laws(97, 44, 1000); }

TEST(SemiringLaws, SketchLift) {
  const SketchSemiring s(5);
  const auto a = s.lift(2.0), b = s.lift(3.0);
  EXPECT_EQ(s.times(a, b), s.lift(6.0));
  EXPECT_EQ(s.plus(a, b), s.lift(5.0));
  EXPECT_EQ(s.width(), 5u);
}

}  // namespace
}  // namespace relboost

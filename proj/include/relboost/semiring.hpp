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

#include <concepts>
#include <cstddef>
#include <cstdint>

namespace relboost {

// A commutative semiring over S::Value. `plus_assign` is the in-place form
// of `plus` used by aggregation loops.
template <class S>
concept Semiring = requires(const S& s, const typename S::Value& a, typename S::Value& acc) {
  typename S::Value;
  { s.zero() } -> std::convertible_to<typename S::Value>;
  { s.one() } -> std::convertible_to<typename S::Value>;
  { s.plus(a, a) } -> std::convertible_to<typename S::Value>;
  { s.times(a, a) } -> std::convertible_to<typename S::Value>;
  { s.width() } -> std::convertible_to<std::size_t>;
  s.plus_assign(acc, a);
};

// (R, +, x). Sums, sums of labels, sums of squared labels.
struct RealSemiring {
  using Value = double;
  Value zero() const { return 0.0; }
  Value one() const { return 1.0; }
  Value plus(Value a, Value b) const { return a + b; }
  Value times(Value a, Value b) const { return a * b; }
  void plus_assign(Value& acc, Value a) const { acc += a; }
  Value lift(double x) const { return x; }
  std::size_t width() const { return 1; }
};

// (N, +, x) over 64-bit unsigned integers; join cardinalities are exact.
struct CountingSemiring {
  using Value = std::uint64_t;
  Value zero() const { return 0; }
  Value one() const { return 1; }
  Value plus(Value a, Value b) const { return a + b; }
  Value times(Value a, Value b) const { return a * b; }
  void plus_assign(Value& acc, Value a) const { acc += a; }
  std::size_t width() const { return 1; }
};

static_assert(Semiring<RealSemiring>);
static_assert(Semiring<CountingSemiring>);

}  // namespace relboost

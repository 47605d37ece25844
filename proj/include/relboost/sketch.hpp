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
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "relboost/database.hpp"
#include "relboost/semiring.hpp"

namespace relboost {

// Coefficient i is the weight of z^i in a polynomial modulo (z^k - 1).
using SketchVector = std::vector<double>;

// h(j) = ((a*j + b) mod p) mod range with p = 2^61 - 1, a in [1,p),
// b in [0,p) drawn from `seed`. The same seed reproduces the same function.
class HashFamily {
 public:
  static constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

  HashFamily(std::uint64_t seed, std::uint64_t range);

  std::uint64_t operator()(std::uint64_t j) const { return raw(j) % range_; }
  // Rademacher sign from the low bit of the raw hash.
  double sign(std::uint64_t j) const { return (raw(j) & 1U) ? 1.0 : -1.0; }

  std::uint64_t multiplier() const { return a_; }
  std::uint64_t offset() const { return b_; }
  std::uint64_t range() const { return range_; }

 private:
  std::uint64_t raw(std::uint64_t j) const;

  std::uint64_t a_;
  std::uint64_t b_;
  std::uint64_t range_;
};

// Bucket and sign hash of one table.
struct TableHashes {
  HashFamily bucket;
  HashFamily sign;
};

// splitmix64 finalizer; used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

// Circular convolution: c_m = sum over i+j = m (mod k) of u_i * v_j.
// Throws DimensionError on length mismatch.
SketchVector poly_mul_mod(const SketchVector& u, const SketchVector& v);
SketchVector poly_mul_mod_naive(const SketchVector& u, const SketchVector& v);
SketchVector poly_mul_mod_fft(const SketchVector& u, const SketchVector& v);

// Dense lengths above this use the FFT path.
inline constexpr std::size_t kFftThreshold = 64;

double sketch_norm_sq(std::span<const double> v);
double sketch_inner(std::span<const double> u, std::span<const double> v);

// ceil((2 + 3^tau) / (epsilon^2 * delta)).
std::size_t default_sketch_width(std::size_t tau, double epsilon, double delta);

// Polynomials modulo (z^k - 1) under coefficient-wise addition and circular
// convolution.
class SketchSemiring {
 public:
  using Value = SketchVector;

  explicit SketchSemiring(std::size_t k);

  Value zero() const { return Value(k_, 0.0); }
  Value one() const {
    Value v(k_, 0.0);
    v[0] = 1.0;
    return v;
  }
  Value plus(const Value& a, const Value& b) const;
  Value times(const Value& a, const Value& b) const { return poly_mul_mod(a, b); }
  void plus_assign(Value& acc, const Value& a) const;
  Value lift(double x) const {
    Value v(k_, 0.0);
    v[0] = x;
    return v;
  }
  std::size_t width() const { return k_; }

 private:
  std::size_t k_;
};

static_assert(Semiring<SketchSemiring>);

// For each table t: E_t (features t owns), the sorted distinct projections
// D_t of t's rows onto E_t, and w_t mapping a projection to its position.
class DomainIndex {
 public:
  explicit DomainIndex(const Database& db);

  std::size_t num_tables() const { return tables_.size(); }
  std::size_t domain_size(std::size_t t) const { return tables_[t].positions.size(); }
  const std::vector<FeatureId>& assigned_features(std::size_t t) const {
    return tables_[t].features;
  }

  // w_t for a row given in table t's column order. Throws IndexError if
  // the projection is not in D_t.
  std::size_t index_of_table_row(std::size_t t, std::span<const double> row) const;
  // w_t for a full join row indexed by feature id.
  std::size_t index_of_join_row(std::size_t t, std::span<const double> join_row) const;
  // w_t for row r of table t (precomputed).
  std::size_t index_of_row(std::size_t t, std::size_t r) const { return tables_[t].row_index[r]; }

 private:
  struct PerTable {
    std::vector<FeatureId> features;
    std::vector<std::size_t> columns;  // columns of E_t within the table
    std::map<std::vector<double>, std::size_t> positions;
    std::vector<std::size_t> row_index;
  };
  std::size_t lookup(std::size_t t, std::vector<double> key) const;

  std::vector<PerTable> tables_;
};

// The sketching operator of one node evaluation: width k and one pair of
// hash functions per table, all derived from a single seed.
class TensorSketch {
 public:
  TensorSketch(std::size_t k, std::size_t num_tables, std::uint64_t seed);

  std::size_t width() const { return k_; }
  std::size_t num_tables() const { return hashes_.size(); }
  const TableHashes& hashes(std::size_t t) const { return hashes_[t]; }

  // Bucket and sign of the basis vector e_{indices[0]} x ... x e_{indices[tau-1]}.
  std::pair<std::size_t, double> kronecker_term(std::span<const std::size_t> indices) const;

 private:
  std::size_t k_;
  std::vector<TableHashes> hashes_;
};

// g_t(e_{w_t(row)}) = s_t(w_t(row)) * z^{h_t(w_t(row))}.
SketchVector table_factor_monomial(std::size_t t, std::span<const double> row,
                                   const DomainIndex& index, const TensorSketch& sketch);

}  // namespace relboost

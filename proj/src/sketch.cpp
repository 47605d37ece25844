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

#include "relboost/sketch.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "relboost/error.hpp"

namespace relboost {

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return mix_seed(mix_seed(a) ^ (b * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

HashFamily::HashFamily(std::uint64_t seed, std::uint64_t range) : range_(range) {
  if (range == 0) throw DimensionError("hash range must be positive");
  const auto x = mix_seed(seed, 1);
  const auto y = mix_seed(seed, 2);
  a_ = 1 + x % (kPrime - 1);
  b_ = y % kPrime;
}

std::uint64_t HashFamily::raw(std::uint64_t j) const {
  const unsigned __int128 prod = static_cast<unsigned __int128>(a_) * (j % kPrime) + b_;
  // Reduce modulo 2^61 - 1 by folding the high bits.
  std::uint64_t lo = static_cast<std::uint64_t>(prod & kPrime);
  std::uint64_t hi = static_cast<std::uint64_t>(prod >> 61);
  std::uint64_t r = lo + hi;
  while (r >= kPrime) r -= kPrime;
  return r;
}

namespace {

void check_lengths(const SketchVector& u, const SketchVector& v) {
  if (u.size() != v.size()) {
    throw DimensionError("sketch length mismatch: " + std::to_string(u.size()) + " vs " +
                         std::to_string(v.size()));
  }
}

// Real-to-complex plans per length. FFTW planning is not thread safe, so
// creation is serialized; execution uses the new-array interface.
class FftPlans {
 public:
  struct Pair {
    fftw_plan forward;
    fftw_plan backward;
  };

  static FftPlans& instance() {
    static FftPlans plans;
    return plans;
  }

  Pair get(std::size_t k) {
    std::lock_guard lock(mu_);
    auto it = plans_.find(k);
    if (it != plans_.end()) return it->second;
    const auto n = static_cast<int>(k);
    double* in = fftw_alloc_real(k);
    fftw_complex* out = fftw_alloc_complex(k / 2 + 1);
    Pair p{fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE),
           fftw_plan_dft_c2r_1d(n, out, in, FFTW_ESTIMATE)};
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(k, p);
    return p;
  }

 private:
  FftPlans() = default;
  std::mutex mu_;
  std::unordered_map<std::size_t, Pair> plans_;
};

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

SketchVector poly_mul_mod_naive(const SketchVector& u, const SketchVector& v) {
  check_lengths(u, v);
  const auto k = u.size();
  SketchVector out(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    if (u[i] == 0.0) continue;
    for (std::size_t j = 0; j < k; ++j) {
      const auto m = i + j >= k ? i + j - k : i + j;
      out[m] += u[i] * v[j];
    }
  }
  return out;
}

SketchVector poly_mul_mod_fft(const SketchVector& u, const SketchVector& v) {
  check_lengths(u, v);
  const auto k = u.size();
  if (k == 0) return {};
  const auto plans = FftPlans::instance().get(k);
  const auto spectrum = k / 2 + 1;
  std::unique_ptr<double, FftwDeleter> buf(fftw_alloc_real(k));
  std::unique_ptr<fftw_complex, FftwDeleter> fu(fftw_alloc_complex(spectrum));
  std::unique_ptr<fftw_complex, FftwDeleter> fv(fftw_alloc_complex(spectrum));

  std::copy(u.begin(), u.end(), buf.get());
  fftw_execute_dft_r2c(plans.forward, buf.get(), fu.get());
  std::copy(v.begin(), v.end(), buf.get());
  fftw_execute_dft_r2c(plans.forward, buf.get(), fv.get());
  for (std::size_t i = 0; i < spectrum; ++i) {
    const std::complex<double> a(fu.get()[i][0], fu.get()[i][1]);
    const std::complex<double> b(fv.get()[i][0], fv.get()[i][1]);
    const auto c = a * b;
    fu.get()[i][0] = c.real();
    fu.get()[i][1] = c.imag();
  }
  fftw_execute_dft_c2r(plans.backward, fu.get(), buf.get());
  SketchVector out(k);
  const double scale = 1.0 / static_cast<double>(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = buf.get()[i] * scale;
  return out;
}

SketchVector poly_mul_mod(const SketchVector& u, const SketchVector& v) {
  check_lengths(u, v);
  const auto k = u.size();
  // Sketch factors are mostly monomials; a sparse operand makes the direct
  // loop O(nnz * k).
  std::vector<std::size_t> nz_u, nz_v;
  for (std::size_t i = 0; i < k; ++i) {
    if (u[i] != 0.0) nz_u.push_back(i);
    if (v[i] != 0.0) nz_v.push_back(i);
  }
  if (nz_u.empty() || nz_v.empty()) return SketchVector(k, 0.0);
  const bool u_sparse = nz_u.size() <= nz_v.size();
  const auto& sparse_idx = u_sparse ? nz_u : nz_v;
  const auto& sparse = u_sparse ? u : v;
  const auto& dense = u_sparse ? v : u;
  if (k <= kFftThreshold || sparse_idx.size() <= 16) {
    SketchVector out(k, 0.0);
    for (const auto i : sparse_idx) {
      const double a = sparse[i];
      // out[(i + j) mod k] += a * dense[j]
      for (std::size_t j = 0; j < k - i; ++j) out[i + j] += a * dense[j];
      for (std::size_t j = k - i; j < k; ++j) out[i + j - k] += a * dense[j];
    }
    return out;
  }
  return poly_mul_mod_fft(u, v);
}

double sketch_norm_sq(std::span<const double> v) {
  double total = 0.0;
  for (const auto x : v) total += x * x;
  return total;
}

double sketch_inner(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw DimensionError("sketch length mismatch: " + std::to_string(u.size()) + " vs " +
                         std::to_string(v.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) total += u[i] * v[i];
  return total;
}

std::size_t default_sketch_width(std::size_t tau, double epsilon, double delta) {
  if (!(epsilon > 0.0) || !(delta > 0.0)) {
    throw DimensionError("epsilon and delta must be positive");
  }
  const double bound = (2.0 + std::pow(3.0, static_cast<double>(tau))) / (epsilon * epsilon * delta);
  // Guard against 440.0000000001 style rounding of exact quotients.
  const double k = std::ceil(bound * (1.0 - 1e-12));
  return static_cast<std::size_t>(std::max(1.0, k));
}

SketchSemiring::SketchSemiring(std::size_t k) : k_(k) {
  if (k == 0) throw DimensionError("sketch width must be at least 1");
}

SketchSemiring::Value SketchSemiring::plus(const Value& a, const Value& b) const {
  Value out = a;
  plus_assign(out, b);
  return out;
}

void SketchSemiring::plus_assign(Value& acc, const Value& a) const {
  if (acc.size() != a.size()) {
    throw DimensionError("sketch length mismatch: " + std::to_string(acc.size()) + " vs " +
                         std::to_string(a.size()));
  }
  for (std::size_t i = 0; i < a.size(); ++i) acc[i] += a[i];
}

DomainIndex::DomainIndex(const Database& db) : tables_(db.num_tables()) {
  for (std::size_t t = 0; t < db.num_tables(); ++t) {
    auto& pt = tables_[t];
    pt.features = db.owned_features(t);
    for (const auto f : pt.features) pt.columns.push_back(*db.column_of(t, f));
    const auto& table = db.table(t);
    std::vector<std::vector<double>> keys(table.num_rows());
    for (std::size_t r = 0; r < table.num_rows(); ++r) {
      for (const auto c : pt.columns) keys[r].push_back(table.at(r, c));
      pt.positions.emplace(keys[r], 0);
    }
    std::size_t next = 0;
    for (auto& [key, pos] : pt.positions) pos = next++;
    pt.row_index.reserve(table.num_rows());
    for (const auto& key : keys) pt.row_index.push_back(pt.positions.at(key));
  }
}

std::size_t DomainIndex::lookup(std::size_t t, std::vector<double> key) const {
  const auto it = tables_[t].positions.find(key);
  if (it == tables_[t].positions.end()) {
    throw IndexError("projection not present in the domain of table " + std::to_string(t));
  }
  return it->second;
}

std::size_t DomainIndex::index_of_table_row(std::size_t t, std::span<const double> row) const {
  if (t >= tables_.size()) throw IndexError("table " + std::to_string(t) + " out of range");
  std::vector<double> key;
  for (const auto c : tables_[t].columns) {
    if (c >= row.size()) throw IndexError("row too short for table " + std::to_string(t));
    key.push_back(row[c]);
  }
  return lookup(t, std::move(key));
}

std::size_t DomainIndex::index_of_join_row(std::size_t t, std::span<const double> join_row) const {
  if (t >= tables_.size()) throw IndexError("table " + std::to_string(t) + " out of range");
  std::vector<double> key;
  for (const auto f : tables_[t].features) key.push_back(join_row[f]);
  return lookup(t, std::move(key));
}

TensorSketch::TensorSketch(std::size_t k, std::size_t num_tables, std::uint64_t seed) : k_(k) {
  if (k == 0) throw DimensionError("sketch width must be at least 1");
  hashes_.reserve(num_tables);
  for (std::size_t t = 0; t < num_tables; ++t) {
    hashes_.push_back({HashFamily(mix_seed(seed, 2 * t), k), HashFamily(mix_seed(seed, 2 * t + 1), 2)});
  }
}

std::pair<std::size_t, double> TensorSketch::kronecker_term(
    std::span<const std::size_t> indices) const {
  if (indices.size() != hashes_.size()) throw DimensionError("one index per table expected");
  std::size_t bucket = 0;
  double sign = 1.0;
  for (std::size_t t = 0; t < indices.size(); ++t) {
    bucket = (bucket + hashes_[t].bucket(indices[t])) % k_;
    sign *= hashes_[t].sign.sign(indices[t]);
  }
  return {bucket, sign};
}

SketchVector table_factor_monomial(std::size_t t, std::span<const double> row,
                                   const DomainIndex& index, const TensorSketch& sketch) {
  const auto j = index.index_of_table_row(t, row);
  const auto& h = sketch.hashes(t);
  SketchVector v(sketch.width(), 0.0);
  v[h.bucket(j)] = h.sign.sign(j);
  return v;
}

}  // namespace relboost

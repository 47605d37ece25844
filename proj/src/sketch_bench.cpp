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

#include "relboost/sketch_bench.hpp"

#include <cmath>
#include <random>
#include <set>

#include "relboost/error.hpp"

namespace relboost {

double SparseTensor::norm_sq() const {
  double acc = 0.0;
  for (const auto v : values) acc += v * v;
  return acc;
}

SparseTensor random_tensor(std::size_t tau, std::size_t dim, std::size_t nnz,
                           std::uint64_t seed) {
  if (tau == 0 || dim == 0) throw ConfigError("tau and dim must be positive");
  const double cells = std::pow(static_cast<double>(dim), static_cast<double>(tau));
  if (static_cast<double>(nnz) > cells) throw ConfigError("nnz exceeds the domain size");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, dim - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  SparseTensor x;
  x.tau = tau;
  x.dim = dim;
  std::set<std::vector<std::size_t>> seen;
  while (x.indices.size() < nnz) {
    std::vector<std::size_t> idx(tau);
    for (auto& i : idx) i = pick(rng);
    if (!seen.insert(idx).second) continue;
    x.indices.push_back(std::move(idx));
    x.values.push_back(normal(rng));
  }
  return x;
}

SketchVector sketch_tensor(const SparseTensor& x, const TensorSketch& sketch) {
  SketchVector out(sketch.width(), 0.0);
  for (std::size_t e = 0; e < x.values.size(); ++e) {
    const auto [bucket, sign] = sketch.kronecker_term(x.indices[e]);
    out[bucket] += sign * x.values[e];
  }
  return out;
}

double BenchResult::failure_rate(double epsilon) const {
  if (estimates.empty()) return 0.0;
  std::size_t fails = 0;
  for (const auto e : estimates) fails += std::abs(e - truth) > epsilon * truth;
  return static_cast<double>(fails) / static_cast<double>(estimates.size());
}

double BenchResult::mean_relative_error() const {
  if (estimates.empty()) return 0.0;
  double acc = 0.0;
  for (const auto e : estimates) acc += std::abs(e - truth) / truth;
  return acc / static_cast<double>(estimates.size());
}

double BenchResult::mean_ratio() const {
  if (estimates.empty()) return 0.0;
  double acc = 0.0;
  for (const auto e : estimates) acc += e;
  return acc / static_cast<double>(estimates.size()) / truth;
}

BenchResult run_sketch_bench(const BenchParams& p) {
  const auto k = p.k ? p.k : default_sketch_width(p.tau, p.epsilon, p.delta);
  const auto x = random_tensor(p.tau, p.dim, p.nnz, p.seed);
  BenchResult out;
  out.truth = x.norm_sq();
  out.estimates.reserve(p.trials);
  for (std::size_t i = 0; i < p.trials; ++i) {
    const TensorSketch sketch(k, p.tau, mix_seed(p.seed, i));
    out.estimates.push_back(sketch_norm_sq(sketch_tensor(x, sketch)));
  }
  return out;
}

}  // namespace relboost

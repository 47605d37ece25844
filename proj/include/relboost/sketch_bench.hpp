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
#include <vector>

#include "relboost/sketch.hpp"

namespace relboost {

// A sparse vector over the product domain [dim]^tau: each entry is a
// tuple of per-mode indices and a value.
struct SparseTensor {
  std::size_t tau = 0;
  std::size_t dim = 0;
  std::vector<std::vector<std::size_t>> indices;
  std::vector<double> values;

  double norm_sq() const;
};

// `nnz` distinct positions with standard normal values.
SparseTensor random_tensor(std::size_t tau, std::size_t dim, std::size_t nnz,
                           std::uint64_t seed);

// The tensor sketch of `x`: sum over entries of value * sign * z^bucket.
SketchVector sketch_tensor(const SparseTensor& x, const TensorSketch& sketch);

struct BenchParams {
  std::size_t tau = 2;
  std::size_t k = 0;
  double epsilon = 0.5;
  double delta = 0.1;
  std::size_t trials = 400;
  std::uint64_t seed = 0;
  std::size_t dim = 16;
  std::size_t nnz = 64;
};

struct BenchResult {
  double truth = 0.0;
  std::vector<double> estimates;

  // Fraction of trials with |estimate - truth| > epsilon * truth.
  double failure_rate(double epsilon) const;
  double mean_relative_error() const;
  // Mean estimate divided by truth.
  double mean_ratio() const;
};

// One fixed random vector; trial i sketches it with seed mix_seed(seed, i).
BenchResult run_sketch_bench(const BenchParams& params);

}  // namespace relboost

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
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "relboost/sketch_bench.hpp"
#include "relboost/trainer.hpp"

namespace relboost::cli {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // IO and other runtime failures
inline constexpr int kExitCyclic = 2;
inline constexpr int kExitConfig = 3;  // configuration, schema or input data
inline constexpr int kExitResource = 4;
inline constexpr int kExitInconsistent = 5;

// Commands write machine-readable results (JSON or CSV) to `out` and
// human-readable summaries and diagnostics to `err`.

int check_join(const std::filesystem::path& join_spec, std::ostream& out, std::ostream& err);

struct TrainOptions {
  std::filesystem::path join_spec;
  std::filesystem::path config;
  std::filesystem::path model_out;
  std::optional<std::uint64_t> seed;
  std::optional<TrainMode> mode;
  bool count_queries = false;  // forces counting on
};

// Writes the model and, next to it, `<stem>.manifest.json`.
int train(const TrainOptions& options, std::ostream& out, std::ostream& err);

// Empty input gives empty output.
int predict(const std::filesystem::path& model, const std::filesystem::path& input,
            std::ostream& out, std::ostream& err);

struct CompareOptions {
  std::filesystem::path join_spec;
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<TrainMode> mode;
  std::optional<std::filesystem::path> oracle_out;  // writes the oracle's model
};

int compare(const CompareOptions& options, std::ostream& out, std::ostream& err);

// A zero `k` means the default width for (tau, epsilon, delta).
int sketch_bench(const BenchParams& params, std::ostream& out, std::ostream& err);

// Parses arguments (argv[0] is the program name) and dispatches.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Path of the manifest written next to `model`.
std::filesystem::path manifest_path(const std::filesystem::path& model);

}  // namespace relboost::cli

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

#include "relboost/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "relboost/design_matrix.hpp"
#include "relboost/error.hpp"
#include "relboost/hypergraph.hpp"
#include "relboost/join_spec.hpp"
#include "relboost/oracle.hpp"
#include "relboost/table.hpp"

namespace relboost::cli {

using nlohmann::json;

namespace {

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const CyclicSchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kExitCyclic;
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const VersionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const Error& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInconsistent;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static const char* const kHex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json tally_json(const QueryTally& t) {
  return {{"stats", t.stats},
          {"leaf_sums", t.leaf_sums},
          {"pair_sums", t.pair_sums},
          {"sketches", t.sketches},
          {"total", t.total()}};
}

// Seed precedence: command-line flag, RELBOOST_SEED, config file, zero.
struct ResolvedConfig {
  TrainConfig config;
  std::string seed_source;
  std::string text;  // raw config file
};

ResolvedConfig resolve_config(const std::filesystem::path& path,
                              const std::optional<std::uint64_t>& seed_flag,
                              const std::optional<TrainMode>& mode_flag) {
  ResolvedConfig r;
  const auto doc = read_json_file(path, "training config");
  r.text = read_file(path);
  r.config = TrainConfig::from_json(doc);
  r.seed_source = doc.contains("seed") ? "config" : "default";
  if (seed_flag) {
    r.config.seed = *seed_flag;
    r.seed_source = "flag";
  } else if (const char* env = std::getenv("RELBOOST_SEED"); env && *env) {
    const std::string s(env);
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) {
      throw ConfigError("RELBOOST_SEED is not an unsigned integer: '" + s + "'");
    }
    r.config.seed = v;
    r.seed_source = "env";
  }
  if (mode_flag) r.config.mode = *mode_flag;
  r.config.validate();
  return r;
}

// Per-node comparison of measured tallies with the closed forms.
struct TallyCheck {
  std::size_t nodes = 0;
  std::size_t mismatches = 0;
  std::string first_mismatch;
};

TallyCheck check_tallies(const TrainReport& report, std::size_t num_tables) {
  TallyCheck c;
  for (const auto& n : report.nodes) {
    ++c.nodes;
    const auto expected = expected_tally(n.mode, n.prior_leaf_counts, num_tables);
    if (expected == n.tally) continue;
    if (c.mismatches++ == 0) {
      c.first_mismatch = "tree " + std::to_string(n.tree) + " node " + std::to_string(n.node) +
                         ": measured " + tally_json(n.tally).dump() + ", expected " +
                         tally_json(expected).dump();
    }
  }
  return c;
}

std::string mode_name(TrainMode m) { return m == TrainMode::kExact ? "exact" : "sketch"; }

std::string split_text(const std::optional<SplitChoice>& s) {
  if (!s) return "leaf";
  return s->feature_name + " >= " + fmt17(s->threshold);
}

}  // namespace

std::filesystem::path manifest_path(const std::filesystem::path& model) {
  auto p = model;
  p.replace_extension(".manifest.json");
  return p;
}

// ---------------------------------------------------------------- check-join

int check_join(const std::filesystem::path& join_spec, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto spec = load_join_spec(join_spec);
    const auto db = load_database(spec);
    const auto h = build_hypergraph(db.tables());
    const auto verdict = check_acyclic(h);

    json report;
    report["acyclic"] = verdict.acyclic;
    report["trace"] = json::array();
    for (const auto& step : verdict.trace) report["trace"].push_back(step.describe(h));
    json ownership = json::object();
    for (std::size_t t = 0; t < db.num_tables(); ++t) {
      json owned = json::array();
      for (const auto f : db.owned_features(t)) owned.push_back(db.feature_name(f));
      ownership[db.table(t).name()] = owned;
    }
    report["ownership"] = ownership;
    report["label"] = db.label_name();

    err << (verdict.acyclic ? "acyclic" : "cyclic") << "\n";
    err << "elimination trace:\n";
    for (const auto& step : verdict.trace) err << "  " << step.describe(h) << "\n";
    if (!verdict.acyclic) {
      report["residual"] = verdict.describe_residual(h);
      err << "residual hypergraph: " << verdict.describe_residual(h) << "\n";
      out << report.dump(2) << "\n";
      return kExitCyclic;
    }
    const auto tree = build_join_tree(h, *db.label_table());
    report["join_tree"] = tree.render(h);
    report["root"] = db.table(tree.nodes[tree.root].table).name();
    err << "join tree:\n" << tree.render(h);
    err << "feature ownership:\n";
    for (std::size_t t = 0; t < db.num_tables(); ++t) {
      err << "  " << db.table(t).name() << ":";
      for (const auto f : db.owned_features(t)) err << " " << db.feature_name(f);
      err << "\n";
    }
    out << report.dump(2) << "\n";
    return kExitOk;
  });
}

// ---------------------------------------------------------------- train

int train(const TrainOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto clock = std::chrono::steady_clock::now();
    json timing;
    const auto spec = load_join_spec(options.join_spec);
    const auto db = load_database(spec);
    auto resolved = resolve_config(options.config, options.seed, options.mode);
    if (options.count_queries) resolved.config.count_queries = true;
    const auto& config = resolved.config;
    timing["load"] = seconds_since(clock);

    clock = std::chrono::steady_clock::now();
    const RelationalContext ctx(db);
    timing["plan"] = seconds_since(clock);

    clock = std::chrono::steady_clock::now();
    TrainReport report;
    const auto model = train_boosted(ctx, config, config.num_trees, &report);
    timing["train"] = seconds_since(clock);

    clock = std::chrono::steady_clock::now();
    const auto text = serialize(model);
    write_file(options.model_out, text);
    timing["write"] = seconds_since(clock);

    json manifest;
    manifest["config"] = config.to_json();
    manifest["config"]["k_effective"] = config.width_for(db.num_tables());
    manifest["seed"] = config.seed;
    manifest["seed_source"] = resolved.seed_source;
    json inputs;
    inputs["join_spec"] = {{"path", options.join_spec.string()},
                           {"sha256", sha256_hex(read_file(options.join_spec))}};
    inputs["config"] = {{"path", options.config.string()}, {"sha256", sha256_hex(resolved.text)}};
    inputs["tables"] = json::array();
    for (std::size_t t = 0; t < spec.tables.size(); ++t) {
      inputs["tables"].push_back({{"name", spec.tables[t].name},
                                  {"path", spec.tables[t].path.string()},
                                  {"rows", db.table(t).num_rows()},
                                  {"sha256", sha256_hex(read_file(spec.tables[t].path))}});
    }
    manifest["inputs"] = inputs;
    manifest["model"] = {{"path", options.model_out.string()}, {"sha256", sha256_hex(text)}};

    bool consistent = true;
    if (config.count_queries) {
      json queries = tally_json(report.total());
      json per_tree = json::array();
      for (std::size_t i = 0; i < model.trees.size(); ++i) {
        QueryTally t;
        for (const auto& n : report.nodes) {
          if (n.tree == i) t += n.tally;
        }
        per_tree.push_back(tally_json(t));
      }
      queries["per_tree"] = per_tree;
      const auto check = check_tallies(report, db.num_tables());
      queries["nodes"] = check.nodes;
      queries["closed_form_match"] = check.mismatches == 0;
      consistent = check.mismatches == 0;
      if (!consistent) err << "query tally mismatch: " << check.first_mismatch << "\n";
      manifest["queries"] = queries;
    }
    manifest["timing_seconds"] = timing;
    write_file(manifest_path(options.model_out), manifest.dump(2) + "\n");

    out << json{{"model", options.model_out.string()},
                {"manifest", manifest_path(options.model_out).string()},
                {"trees", model.trees.size()},
                {"mode", mode_name(config.mode)},
                {"seed", config.seed}}
               .dump()
        << "\n";
    err << "trained " << model.trees.size() << " tree(s) in " << mode_name(config.mode)
        << " mode on " << db.num_tables() << " table(s)";
    if (config.count_queries) err << ", " << report.total().total() << " grouped queries";
    err << "\n";
    return consistent ? kExitOk : kExitInconsistent;
  });
}

// ---------------------------------------------------------------- predict

int predict(const std::filesystem::path& model_path, const std::filesystem::path& input,
            std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto model = deserialize(read_file(model_path));
    const auto text = read_file(input);
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return kExitOk;
    std::istringstream stream(text);
    const auto rows = load_table(stream, input.filename().string());

    std::set<FeatureId> referenced;
    for (const auto& tree : model.trees) {
      for (const auto& node : tree.nodes()) {
        if (node.split) referenced.insert(node.split->feature);
      }
    }
    std::vector<std::optional<std::size_t>> column(model.features.size());
    for (std::size_t f = 0; f < model.features.size(); ++f) {
      column[f] = rows.column_index(model.features[f]);
      if (referenced.count(f) && !column[f]) {
        throw SchemaError("input lacks column '" + model.features[f] + "'");
      }
    }
    std::vector<double> row(model.features.size(), std::nan(""));
    out << "prediction\n";
    for (std::size_t r = 0; r < rows.num_rows(); ++r) {
      for (std::size_t f = 0; f < row.size(); ++f) {
        if (column[f]) row[f] = rows.at(r, *column[f]);
      }
      out << fmt17(predict_ensemble(model, row)) << "\n";
    }
    err << "predicted " << rows.num_rows() << " row(s)\n";
    return kExitOk;
  });
}

// ---------------------------------------------------------------- compare

namespace {

double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

int compare(const CompareOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto spec = load_join_spec(options.join_spec);
    const auto db = load_database(spec);
    auto config = resolve_config(options.config, options.seed, options.mode).config;
    config.count_queries = true;
    const RelationalContext ctx(db);
    const auto dm = materialize_join(db, spec.join_cap);

    TrainReport report;
    const auto relational = train_boosted(ctx, config, config.num_trees, &report);
    const auto check = check_tallies(report, db.num_tables());

    json result;
    result["mode"] = mode_name(config.mode);
    result["join_rows"] = dm.num_rows();
    result["queries"] = tally_json(report.total());
    result["tally_nodes"] = check.nodes;
    result["tally_mismatches"] = check.mismatches;
    if (check.mismatches) result["first_tally_mismatch"] = check.first_mismatch;

    bool equal = check.mismatches == 0;
    if (config.mode == TrainMode::kExact) {
      OracleReport oracle_report;
      const auto oracle = train_boosted_oracle(db, dm, config, config.num_trees, &oracle_report);
      if (options.oracle_out) write_file(*options.oracle_out, serialize(oracle));
      const auto diff = compare_ensembles(relational, oracle, 1e-9);
      double deviation = 0.0;
      for (const auto& rec : report.nodes) {
        for (const auto& orec : oracle_report.nodes) {
          if (orec.tree != rec.tree || orec.node != rec.node) continue;
          deviation = std::max({deviation, relative_gap(rec.totals.count, orec.totals.count),
                                relative_gap(rec.totals.sum, orec.totals.sum),
                                relative_gap(rec.totals.sum_sq, orec.totals.sum_sq)});
        }
      }
      result["structure"] = diff ? *diff : "identical";
      result["max_statistic_deviation"] = deviation;
      result["verdict"] = diff || check.mismatches ? "DIFFERENT" : "IDENTICAL";
      equal = equal && !diff;
      err << (diff ? "DIFFERENT: " + *diff : std::string("IDENTICAL")) << "\n";
      err << "max statistic deviation " << deviation << "\n";
    } else {
      if (options.oracle_out) {
        write_file(*options.oracle_out,
                   serialize(train_boosted_oracle(db, dm, config, config.num_trees)));
      }
      json nodes = json::array();
      double worst = 0.0;
      std::size_t evaluated = 0, within = 0;
      for (const auto& rec : report.nodes) {
        if (rec.mode != TrainMode::kSketch || !rec.split) continue;
        Ensemble prior;
        prior.label = relational.label;
        prior.features = relational.features;
        prior.trees.assign(relational.trees.begin(),
                           relational.trees.begin() + static_cast<std::ptrdiff_t>(rec.tree));
        const auto path = relational.trees[rec.tree].path_constraints(rec.node);
        const auto best = oracle_evaluate_node(db, dm, prior, path, config.min_node);
        const double chosen =
            split_true_sse(dm, prior, path, rec.split->feature, rec.split->threshold);
        const double optimum = best.split ? best.split->objective : best.totals.sse();
        const double tol = split_tolerance(best.label_sq);
        const double ratio = optimum > tol ? chosen / optimum : (chosen <= tol ? 1.0 : INFINITY);
        worst = std::max(worst, ratio);
        ++evaluated;
        within += ratio <= 1.0 + 3.0 * config.epsilon;
        nodes.push_back({{"tree", rec.tree},
                         {"node", rec.node},
                         {"chosen", split_text(rec.split)},
                         {"exact", split_text(best.split)},
                         {"true_sse", chosen},
                         {"optimal_sse", optimum},
                         {"ratio", ratio}});
      }
      result["sketched_nodes"] = nodes;
      result["max_sse_ratio"] = worst;
      result["within_bound"] = within;
      result["verdict"] = check.mismatches ? "DIFFERENT" : "CONSISTENT";
      err << evaluated << " sketched split(s), " << within << " within (1 + 3 epsilon), worst ratio "
          << worst << "\n";
    }
    if (check.mismatches) err << "query tally mismatch: " << check.first_mismatch << "\n";
    out << result.dump(2) << "\n";
    return equal ? kExitOk : kExitInconsistent;
  });
}

// ---------------------------------------------------------------- sketch-bench

int sketch_bench(const BenchParams& params, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (params.tau < 1) throw ConfigError("tau must be at least 1");
    if (!(params.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (!(params.delta > 0.0 && params.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
    auto p = params;
    if (p.k == 0) p.k = default_sketch_width(p.tau, p.epsilon, p.delta);
    out << "tau,k,epsilon,delta,trials,truth,failure_rate,mean_relative_error,mean_ratio\n";
    if (p.trials == 0) {
      err << "no trials requested\n";
      return kExitOk;
    }
    const auto r = run_sketch_bench(p);
    out << p.tau << "," << p.k << "," << fmt17(p.epsilon) << "," << fmt17(p.delta) << ","
        << p.trials << "," << fmt17(r.truth) << "," << fmt17(r.failure_rate(p.epsilon)) << ","
        << fmt17(r.mean_relative_error()) << "," << fmt17(r.mean_ratio()) << "\n";
    err << "k=" << p.k << ": failure rate " << r.failure_rate(p.epsilon) << " (delta "
        << p.delta << "), mean estimate / truth " << r.mean_ratio() << "\n";
    return kExitOk;
  });
}

// ---------------------------------------------------------------- dispatch

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gradient boosted regression trees trained over joins of CSV tables."};
  app.require_subcommand(1);

  std::string join, config, model_out, model, input, mode_text;
  std::optional<std::uint64_t> seed;
  bool count_queries = false;
  const std::map<std::string, TrainMode> modes{{"exact", TrainMode::kExact},
                                               {"sketch", TrainMode::kSketch}};

  auto* check_cmd = app.add_subcommand("check-join", "Report acyclicity and the join tree");
  check_cmd->add_option("--join", join, "Join spec JSON")->required();

  auto* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--join", join, "Join spec JSON")->required();
  train_cmd->add_option("--config", config, "Training config JSON")->required();
  train_cmd->add_option("--out", model_out, "Model output path")->required();
  train_cmd->add_option("--seed", seed, "Sketch seed (overrides RELBOOST_SEED and config)");
  train_cmd->add_option("--mode", mode_text, "exact or sketch")
      ->check(CLI::IsMember({"exact", "sketch"}));
  train_cmd->add_flag("--count-queries", count_queries, "Tally grouped queries");

  auto* predict_cmd = app.add_subcommand("predict", "Predict rows of a CSV file");
  predict_cmd->add_option("--model", model, "Model JSON")->required();
  predict_cmd->add_option("--input", input, "CSV with one row per example")->required();

  auto* compare_cmd = app.add_subcommand("compare", "Train relationally and on the join; diff");
  compare_cmd->add_option("--join", join, "Join spec JSON")->required();
  compare_cmd->add_option("--config", config, "Training config JSON")->required();
  compare_cmd->add_option("--seed", seed, "Sketch seed");
  compare_cmd->add_option("--mode", mode_text, "exact or sketch")
      ->check(CLI::IsMember({"exact", "sketch"}));
  std::string oracle_out;
  compare_cmd->add_option("--oracle-out", oracle_out, "Write the design-matrix model here");

  BenchParams bench;
  auto* bench_cmd = app.add_subcommand("sketch-bench", "Monte-Carlo check of sketched norms");
  bench_cmd->add_option("--tau", bench.tau, "Number of tensor modes");
  bench_cmd->add_option("--k", bench.k, "Sketch width (default from epsilon, delta, tau)");
  bench_cmd->add_option("--epsilon", bench.epsilon, "Relative error bound");
  bench_cmd->add_option("--delta", bench.delta, "Failure probability");
  bench_cmd->add_option("--trials", bench.trials, "Number of seeded trials");
  bench_cmd->add_option("--seed", bench.seed, "Base seed");
  bench_cmd->add_option("--dim", bench.dim, "Domain size per mode");
  bench_cmd->add_option("--nnz", bench.nnz, "Non-zero entries of the vector");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  std::optional<TrainMode> mode;
  if (!mode_text.empty()) mode = modes.at(mode_text);
  if (*check_cmd) return check_join(join, out, err);
  if (*train_cmd) return train({join, config, model_out, seed, mode, count_queries}, out, err);
  if (*predict_cmd) return predict(model, input, out, err);
  if (*compare_cmd) {
    CompareOptions o{join, config, seed, mode, std::nullopt};
    if (!oracle_out.empty()) o.oracle_out = oracle_out;
    return compare(o, out, err);
  }
  return sketch_bench(bench, out, err);
}

}  // namespace relboost::cli

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

#include "relboost/join_spec.hpp"

#include <fstream>
#include <sstream>

#include "relboost/error.hpp"
#include "relboost/table.hpp"

namespace relboost {

using nlohmann::json;

JoinSpec parse_join_spec(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("join spec must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "tables" && key != "label" && key != "join_cap") {
      throw ConfigError("unknown join spec key '" + key + "'");
    }
  }
  JoinSpec spec;
  if (!doc.contains("tables") || !doc.at("tables").is_array() || doc.at("tables").empty()) {
    throw ConfigError("join spec needs a non-empty \"tables\" array");
  }
  for (const auto& entry : doc.at("tables")) {
    if (!entry.is_object() || !entry.contains("name") || !entry.contains("path") ||
        !entry.at("name").is_string() || !entry.at("path").is_string()) {
      throw ConfigError("each table needs string \"name\" and \"path\"");
    }
    std::filesystem::path p = entry.at("path").get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    spec.tables.push_back({entry.at("name").get<std::string>(), p});
  }
  if (!doc.contains("label") || !doc.at("label").is_string()) {
    throw ConfigError("join spec needs a string \"label\"");
  }
  spec.label = doc.at("label").get<std::string>();
  if (doc.contains("join_cap")) {
    if (!doc.at("join_cap").is_number_unsigned() || doc.at("join_cap").get<std::size_t>() == 0) {
      throw ConfigError("join_cap must be a positive integer");
    }
    spec.join_cap = doc.at("join_cap").get<std::size_t>();
  }
  return spec;
}

json read_json_file(const std::filesystem::path& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + what + " '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const auto text = buffer.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError("invalid JSON in " + what + " '" + path.string() + "'", line, column);
  }
}

JoinSpec load_join_spec(const std::filesystem::path& path) {
  return parse_join_spec(read_json_file(path, "join spec"), path.parent_path());
}

Database load_database(const JoinSpec& spec) {
  std::vector<Table> tables;
  tables.reserve(spec.tables.size());
  for (const auto& e : spec.tables) tables.push_back(load_table(e.path, e.name));
  return Database(std::move(tables), spec.label);
}

}  // namespace relboost

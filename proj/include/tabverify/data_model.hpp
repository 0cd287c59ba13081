//
// Copyright 2026 The tabverify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tabverify {

enum class Label { Entailed, Refuted, Neutral };

inline constexpr std::string_view to_string(Label label) {
  switch (label) {
    case Label::Entailed: return "entailed";
    case Label::Refuted: return "refuted";
    case Label::Neutral: return "neutral";
  }
  return "neutral";
}

// Case-insensitive. "unknown" is accepted as a synonym for neutral.
inline std::optional<Label> parse_label(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "entailed") return Label::Entailed;
  if (lower == "refuted") return Label::Refuted;
  if (lower == "neutral" || lower == "unknown") return Label::Neutral;
  return std::nullopt;
}

inline constexpr bool is_non_neutral(Label label) {
  return label != Label::Neutral;
}

// The two binary classifiers of the cascade.
enum class Stage { Stage1, Stage2 };

inline constexpr std::string_view to_string(Stage stage) {
  return stage == Stage::Stage1 ? "stage1" : "stage2";
}

struct Table {
  std::string id;
  std::string caption;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t num_columns() const { return header.size(); }
  std::size_t num_rows() const { return rows.size(); }

  friend bool operator==(const Table&, const Table&) = default;
};

struct Statement {
  std::string id;
  std::string table_id;
  std::string text;
  std::optional<Label> gold;

  friend bool operator==(const Statement&, const Statement&) = default;
};

struct Dataset {
  std::map<std::string, Table> tables;
  std::vector<Statement> statements;

  const Table* find_table(const std::string& id) const {
    auto it = tables.find(id);
    return it == tables.end() ? nullptr : &it->second;
  }

  const Table& table_of(const Statement& s) const {
    return tables.at(s.table_id);
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Body-row coordinates; the header row is not addressable.
struct CellCoord {
  std::size_t row = 0;
  std::size_t col = 0;

  friend auto operator<=>(const CellCoord&, const CellCoord&) = default;
};

struct EvidencePrediction {
  std::string statement_id;
  std::string model_id;
  Label predicted_label = Label::Entailed;  // Entailed or Refuted only
  std::set<CellCoord> cells;

  friend bool operator==(const EvidencePrediction&,
                         const EvidencePrediction&) = default;
};

inline bool in_bounds(const Table& table, const CellCoord& cell) {
  return cell.row < table.num_rows() && cell.col < table.num_columns();
}

struct Violation {
  std::string id;
  std::string rule;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

namespace detail {

inline bool has_space(std::string_view s) {
  return std::any_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace detail

// Checks every invariant of the domain types. An empty result means the
// dataset is well formed.
inline std::vector<Violation> validate_dataset(const Dataset& d) {
  std::vector<Violation> out;
  auto add = [&out](std::string id, std::string rule, std::string message) {
    out.push_back({std::move(id), std::move(rule), std::move(message)});
  };

  for (const auto& [key, table] : d.tables) {
    if (table.id.empty()) add(key, "empty-id", "table id is empty");
    else if (detail::has_space(table.id))
      add(table.id, "whitespace-in-id", "table id contains whitespace");
    if (key != table.id)
      add(key, "key-mismatch", "table stored under key '" + key +
                                   "' has id '" + table.id + "'");
    if (table.header.empty())
      add(table.id, "empty-header", "table has no columns");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      if (table.rows[r].size() != table.header.size()) {
        add(table.id, "ragged-row",
            "row " + std::to_string(r) + " has " +
                std::to_string(table.rows[r].size()) + " cells, header has " +
                std::to_string(table.header.size()));
      }
    }
  }

  std::set<std::string> seen;
  for (const auto& s : d.statements) {
    if (s.id.empty()) add(s.id, "empty-id", "statement id is empty");
    else if (detail::has_space(s.id))
      add(s.id, "whitespace-in-id", "statement id contains whitespace");
    if (!seen.insert(s.id).second)
      add(s.id, "duplicate-id", "statement id appears more than once");
    if (s.text.empty()) add(s.id, "empty-text", "statement text is empty");
    if (!d.tables.contains(s.table_id))
      add(s.id, "dangling-table-ref",
          "references unknown table '" + s.table_id + "'");
  }
  return out;
}

// Canonical form: statements ordered by id (tables are already id-ordered).
inline Dataset canonical(Dataset d) {
  std::stable_sort(d.statements.begin(), d.statements.end(),
                   [](const Statement& a, const Statement& b) {
                     return a.id < b.id;
                   });
  return d;
}

}  // namespace tabverify

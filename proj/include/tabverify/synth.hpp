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

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "tabverify/data_model.hpp"
#include "tabverify/error.hpp"
#include "tabverify/rng.hpp"

// Artificial neutral statements for training the neutral/non-neutral stage.
// Two sources: a statement paired with a table it was not written for, and a
// statement whose table lost one of its evidence columns.
namespace tabverify {

enum class NeutralSource { RandomPairing, ColumnRemoval };

struct Provenance {
  std::string original_statement_id;
  std::string original_table_id;
  std::optional<std::size_t> removed_col;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct NeutralExample {
  Statement statement;  // gold is always Neutral
  NeutralSource source = NeutralSource::RandomPairing;
  std::optional<Table> derived_table;  // present iff ColumnRemoval
  Provenance provenance;

  friend bool operator==(const NeutralExample&, const NeutralExample&) = default;
};

inline std::string random_pairing_id(const std::string& orig, std::size_t k) {
  return orig + "#rp" + std::to_string(k);
}
inline std::string column_removal_id(const std::string& orig, std::size_t col) {
  return orig + "#cr" + std::to_string(col);
}
inline std::string dropped_table_id(const std::string& orig, std::size_t col) {
  return orig + "#drop" + std::to_string(col);
}

namespace detail {

inline std::vector<NeutralExample> pair_random_neutrals(const Dataset& d,
                                                        std::size_t n,
                                                        Rng& rng) {
  if (d.tables.size() < 2)
    throw data_error("random pairing needs at least 2 tables, dataset has " +
                     std::to_string(d.tables.size()));
  if (n > 0 && d.statements.empty())
    throw data_error("random pairing needs at least one statement");

  std::vector<const Table*> tables;
  std::map<std::string, std::size_t> table_index;
  for (const auto& [id, t] : d.tables) {
    table_index.emplace(id, tables.size());
    tables.push_back(&t);
  }

  std::vector<NeutralExample> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Statement& src = d.statements[rng.index(d.statements.size())];
    const std::size_t own = table_index.at(src.table_id);
    // Uniform over the other tables: draw from n-1 slots and skip our own.
    std::size_t pick = rng.index(tables.size() - 1);
    if (pick >= own) ++pick;

    NeutralExample ex;
    ex.source = NeutralSource::RandomPairing;
    ex.statement = {random_pairing_id(src.id, k), tables[pick]->id, src.text,
                    Label::Neutral};
    ex.provenance = {src.id, src.table_id, std::nullopt};
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace detail

// n examples, each pairing a (uniformly drawn) statement's text with a
// uniformly drawn table other than its own. Deterministic for a given seed.
inline std::vector<NeutralExample> pair_random_neutrals(const Dataset& d,
                                                        std::size_t n,
                                                        std::uint64_t seed) {
  Rng rng(seed);
  return detail::pair_random_neutrals(d, n, rng);
}

// Columns (other than column 0) that a strict majority of the ensemble marked
// with at least one evidence cell. Nothing is extracted unless a strict
// majority of the ensemble also predicted the gold label.
inline std::set<std::size_t> extract_evidence_columns(
    const Table& table, Label gold, std::span<const EvidencePrediction> preds) {
  std::set<std::size_t> out;
  if (preds.empty()) return out;
  for (const auto& p : preds) {
    if (p.statement_id != preds.front().statement_id)
      throw data_error("evidence predictions mix statements '" +
                       preds.front().statement_id + "' and '" +
                       p.statement_id + "'");
  }

  const std::size_t ensemble = preds.size();
  std::size_t correct = 0;
  std::map<std::size_t, std::size_t> votes;
  for (const auto& p : preds) {
    if (p.predicted_label == gold) ++correct;
    std::set<std::size_t> cols;
    for (const auto& cell : p.cells) cols.insert(cell.col);
    for (auto c : cols) ++votes[c];
  }
  if (2 * correct <= ensemble) return out;

  for (const auto& [col, count] : votes) {
    if (col == 0 || col >= table.num_columns()) continue;
    if (2 * count > ensemble) out.insert(col);
  }
  return out;
}

// Copy of `t` without column `col`. Column 0 usually names the row entries
// and is never removed.
inline Table remove_column(const Table& t, std::size_t col) {
  if (col == 0)
    throw data_error("table '" + t.id + "': the first column is protected");
  if (col >= t.num_columns())
    throw data_error("table '" + t.id + "': column " + std::to_string(col) +
                     " out of range (" + std::to_string(t.num_columns()) +
                     " columns)");
  Table out;
  out.id = dropped_table_id(t.id, col);
  out.caption = t.caption;
  out.header = t.header;
  out.header.erase(out.header.begin() + static_cast<std::ptrdiff_t>(col));
  out.rows.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    auto r = row;
    r.erase(r.begin() + static_cast<std::ptrdiff_t>(col));
    out.rows.push_back(std::move(r));
  }
  return out;
}

// One neutral example per (statement, extracted evidence column), sorted by
// (statement id, table id, column). Statements without an Entailed/Refuted
// gold label are skipped.
inline std::vector<NeutralExample> gen_column_removal_neutrals(
    const Dataset& d, std::span<const EvidencePrediction> evidence) {
  // statement id -> model id -> prediction
  std::map<std::string, std::map<std::string, EvidencePrediction>> grouped;
  for (const auto& p : evidence) {
    auto [it, inserted] = grouped[p.statement_id].emplace(p.model_id, p);
    if (!inserted && !(it->second == p))
      throw data_error("conflicting evidence predictions for statement '" +
                       p.statement_id + "' from model '" + p.model_id + "'");
  }

  using Key = std::tuple<std::string, std::string, std::size_t>;
  std::map<Key, NeutralExample> unique;
  for (const auto& s : d.statements) {
    if (!s.gold || *s.gold == Label::Neutral) continue;
    auto git = grouped.find(s.id);
    if (git == grouped.end()) continue;

    std::vector<EvidencePrediction> preds;
    for (const auto& [model, p] : git->second) preds.push_back(p);
    const Table& table = d.table_of(s);
    for (auto col : extract_evidence_columns(table, *s.gold, preds)) {
      Key key{s.id, s.table_id, col};
      if (unique.contains(key)) continue;
      NeutralExample ex;
      ex.source = NeutralSource::ColumnRemoval;
      ex.derived_table = remove_column(table, col);
      ex.statement = {column_removal_id(s.id, col), ex.derived_table->id,
                      s.text, Label::Neutral};
      ex.provenance = {s.id, s.table_id, col};
      unique.emplace(std::move(key), std::move(ex));
    }
  }

  std::vector<NeutralExample> out;
  out.reserve(unique.size());
  for (auto& [key, ex] : unique) out.push_back(std::move(ex));
  return out;
}

// Packs examples into a dataset holding exactly the tables they reference.
inline Dataset neutrals_to_dataset(const Dataset& base,
                                   std::span<const NeutralExample> examples) {
  Dataset out;
  for (const auto& ex : examples) {
    if (ex.derived_table) {
      auto [it, inserted] =
          out.tables.emplace(ex.derived_table->id, *ex.derived_table);
      if (!inserted && !(it->second == *ex.derived_table))
        throw data_error("derived table id collision on '" +
                         ex.derived_table->id + "'");
    } else {
      const Table* t = base.find_table(ex.statement.table_id);
      if (!t)
        throw data_error("example '" + ex.statement.id +
                         "' references unknown table '" +
                         ex.statement.table_id + "'");
      out.tables.emplace(t->id, *t);
    }
    out.statements.push_back(ex.statement);
  }
  return out;
}

// Inverse of neutrals_to_dataset for column-removal pools read from disk.
// Provenance is recovered from the generated ids.
inline std::vector<NeutralExample> removal_pool_from_dataset(
    const Dataset& pool) {
  std::vector<NeutralExample> out;
  for (const auto& s : pool.statements) {
    auto bad = [&s](const std::string& why) {
      return data_error("pool statement '" + s.id + "': " + why);
    };
    if (s.gold != Label::Neutral) throw bad("gold label must be neutral");
    auto cr = s.id.rfind("#cr");
    auto drop = s.table_id.rfind("#drop");
    if (cr == std::string::npos || drop == std::string::npos)
      throw bad("not a column-removal example");
    std::size_t col = 0;
    try {
      col = std::stoul(s.table_id.substr(drop + 5));
    } catch (const std::exception&) {
      throw bad("cannot read removed column from '" + s.table_id + "'");
    }
    const Table* t = pool.find_table(s.table_id);
    if (!t) throw bad("derived table '" + s.table_id + "' missing");

    NeutralExample ex;
    ex.source = NeutralSource::ColumnRemoval;
    ex.statement = s;
    ex.derived_table = *t;
    ex.provenance = {s.id.substr(0, cr), s.table_id.substr(0, drop), col};
    out.push_back(std::move(ex));
  }
  return out;
}

// Balanced neutral/non-neutral training set. The original statements are
// the positives (their Entailed/Refuted gold is kept; non-neutral means
// gold != Neutral). An equal number of negatives follows: floor(n/2) random
// pairings and the rest drawn with replacement from `removal_pool`.
inline Dataset build_stage1_trainset(const Dataset& d,
                                     std::span<const NeutralExample> removal_pool,
                                     std::uint64_t seed) {
  for (const auto& s : d.statements) {
    if (!s.gold || *s.gold == Label::Neutral)
      throw data_error("statement '" + s.id +
                       "' must be gold-labeled entailed or refuted");
  }
  if (removal_pool.empty())
    throw data_error("column-removal pool is empty");
  if (d.tables.size() < 2)
    throw data_error("stage-1 training set needs at least 2 tables");

  const std::size_t n = d.statements.size();
  const std::size_t n_random = n / 2;
  const std::size_t n_removal = n - n_random;

  Rng rng(seed);
  Dataset out;
  out.tables = d.tables;
  out.statements = d.statements;
  out.statements.reserve(2 * n);

  for (auto& ex : detail::pair_random_neutrals(d, n_random, rng))
    out.statements.push_back(std::move(ex.statement));

  std::map<std::size_t, std::size_t> uses;
  for (std::size_t k = 0; k < n_removal; ++k) {
    const std::size_t pick = rng.index(removal_pool.size());
    const NeutralExample& ex = removal_pool[pick];
    if (!ex.derived_table)
      throw data_error("pool example '" + ex.statement.id +
                       "' has no derived table");
    auto [tit, inserted] =
        out.tables.emplace(ex.derived_table->id, *ex.derived_table);
    if (!inserted && !(tit->second == *ex.derived_table))
      throw data_error("derived table id collision on '" +
                       ex.derived_table->id + "'");

    Statement s = ex.statement;
    s.gold = Label::Neutral;
    if (auto count = uses[pick]++; count > 0)
      s.id += "-dup" + std::to_string(count);
    out.statements.push_back(std::move(s));
  }

  if (auto violations = validate_dataset(out); !violations.empty())
    throw data_error("generated training set is invalid: " +
                     violations.front().rule + " [" + violations.front().id +
                     "]");
  return out;
}

}  // namespace tabverify

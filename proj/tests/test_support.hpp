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

// Shared fixtures and independent oracles for the test suites. Nothing in
// here calls into the code paths it is used to check.

#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tabverify.hpp"

namespace tabverify::testing {

inline Table make_table(std::string id, std::vector<std::string> header,
                        std::vector<std::vector<std::string>> rows,
                        std::string caption = "") {
  return {std::move(id), std::move(caption), std::move(header), std::move(rows)};
}

inline Dataset two_table_dataset() {
  Dataset d;
  d.tables.emplace("t1", make_table("t1", {"Model", "Acc", "F1"},
                                    {{"A", "70.1", "65.0"}, {"B", "72.4", "69.3"}},
                                    "Results"));
  d.tables.emplace("t2", make_table("t2", {"Name", "Size"},
                                    {{"X", "10"}, {"Y", "20"}, {"Z", "30"}}));
  d.statements = {{"s1", "t1", "B has the highest accuracy", Label::Entailed},
                  {"s2", "t1", "A has higher F1 than B", Label::Refuted},
                  {"s3", "t2", "Z is the largest", Label::Entailed}};
  return d;
}

// Random well-formed dataset; the generator is the test's own std::mt19937.
struct RandomDatasetOptions {
  std::size_t min_tables = 1;
  std::size_t max_tables = 4;
  std::size_t min_statements = 1;
  std::size_t max_statements = 8;  // per table
  std::size_t max_columns = 5;
  bool allow_neutral = true;
};

inline Dataset random_dataset(std::mt19937& gen, RandomDatasetOptions o = {}) {
  auto pick = [&gen](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(gen);
  };
  static const char* words[] = {"alpha", "beta", "gamma", "higher", "best",
                                "total", "not",  "than",  "12",     "0.5"};
  Dataset d;
  const auto n_tables = pick(o.min_tables, o.max_tables);
  std::size_t sid = 0;
  for (std::size_t t = 0; t < n_tables; ++t) {
    Table tab;
    tab.id = "t" + std::to_string(t);
    const auto cols = pick(1, o.max_columns);
    const auto rows = pick(1, 4);
    for (std::size_t c = 0; c < cols; ++c)
      tab.header.push_back("h" + std::to_string(c));
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<std::string> row;
      for (std::size_t c = 0; c < cols; ++c)
        row.push_back(std::string(words[pick(0, 9)]) + std::to_string(r * 10 + c));
      tab.rows.push_back(std::move(row));
    }
    const auto n_statements = pick(o.min_statements, o.max_statements);
    for (std::size_t s = 0; s < n_statements; ++s) {
      Label gold = static_cast<Label>(pick(0, o.allow_neutral ? 2 : 1));
      std::string text = std::string(words[pick(0, 9)]) + " " + words[pick(0, 9)] +
                         " " + words[pick(0, 9)];
      d.statements.push_back(
          {"s" + std::to_string(sid++), tab.id, std::move(text), gold});
    }
    d.tables.emplace(tab.id, std::move(tab));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Brute-force F1 oracle: per-class TP/FP/FN enumeration and exact rational
// precision/recall/F1.
// ---------------------------------------------------------------------------

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t n, std::int64_t d) {
    const auto g = std::gcd(n, d);
    return g ? Rational{n / g, d / g} : Rational{0, 1};
  }
  Rational operator+(const Rational& o) const {
    return make(num * o.den + o.num * den, den * o.den);
  }
  Rational operator*(const Rational& o) const {
    return make(num * o.num, den * o.den);
  }
  Rational operator/(const Rational& o) const {
    return make(num * o.den, den * o.num);
  }
  double value() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }
};

inline std::optional<double> oracle_f1(const std::vector<Label>& gold,
                                       const std::vector<Label>& pred,
                                       bool two_way) {
  std::vector<Label> classes =
      two_way ? std::vector<Label>{Label::Entailed, Label::Refuted}
              : std::vector<Label>{Label::Entailed, Label::Refuted, Label::Neutral};
  std::int64_t tp = 0, fp = 0, fn = 0, kept = 0;
  for (std::size_t i = 0; i < gold.size(); ++i)
    if (!two_way || gold[i] != Label::Neutral) ++kept;
  if (kept == 0) return std::nullopt;
  for (Label c : classes) {
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (two_way && gold[i] == Label::Neutral) continue;
      const bool g = gold[i] == c;
      const bool p = pred[i] == c;
      tp += g && p;
      fp += !g && p;
      fn += g && !p;
    }
  }
  if (tp == 0) return 0.0;
  const auto precision = Rational::make(tp, tp + fp);
  const auto recall = Rational::make(tp, tp + fn);
  const auto f1 = Rational{2, 1} * precision * recall / (precision + recall);
  return f1.value();
}

// Reinserts `values` (header first, then one per row) at column `col`.
inline Table reinsert_column(const Table& t, std::size_t col,
                             const std::vector<std::string>& values,
                             std::string id) {
  Table out = t;
  out.id = std::move(id);
  out.header.insert(out.header.begin() + static_cast<std::ptrdiff_t>(col),
                    values.at(0));
  for (std::size_t r = 0; r < out.rows.size(); ++r)
    out.rows[r].insert(out.rows[r].begin() + static_cast<std::ptrdiff_t>(col),
                       values.at(r + 1));
  return out;
}

inline std::vector<std::string> column_values(const Table& t, std::size_t col) {
  std::vector<std::string> out{t.header.at(col)};
  for (const auto& row : t.rows) out.push_back(row.at(col));
  return out;
}

// Labels of `d` grouped by table, in dataset order.
inline std::map<std::string, std::vector<Label>> gold_by_table(const Dataset& d) {
  std::map<std::string, std::vector<Label>> out;
  for (const auto& s : d.statements) out[s.table_id].push_back(*s.gold);
  return out;
}

inline std::vector<Prediction> constant_predictions(const Dataset& d, Label l) {
  std::vector<Prediction> out;
  for (const auto& s : d.statements) out.push_back({s.id, 0.0, 0.0, l});
  return out;
}

inline ScoreSet make_scoreset(Stage stage, std::string model,
                              std::map<std::string, double> scores) {
  return {stage, std::move(model), std::move(scores)};
}

}  // namespace tabverify::testing

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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tabverify/data_model.hpp"
#include "tabverify/error.hpp"
#include "tabverify/prediction.hpp"
#include "tabverify/text.hpp"

// Task metric: micro-F1 over the statements of each table, 3-way over all
// statements and 2-way over gold entailed/refuted statements only.
namespace tabverify {

enum class F1Mode { TwoWay, ThreeWay };

// How per-table scores combine into one number.
enum class Aggregation { PerTableMean, Global };

struct F1Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t counted = 0;  // statements that survived the mode's filter

  F1Counts& operator+=(const F1Counts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    counted += o.counted;
    return *this;
  }
};

// Pooled over classes. In TwoWay mode gold-neutral statements are dropped and
// a neutral prediction counts as a miss (FN) without a false alarm.
inline F1Counts count_f1(std::span<const Label> gold, std::span<const Label> pred,
                         F1Mode mode) {
  if (gold.size() != pred.size())
    throw data_error("gold/prediction length mismatch: " +
                     std::to_string(gold.size()) + " vs " +
                     std::to_string(pred.size()));
  F1Counts c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (mode == F1Mode::TwoWay && gold[i] == Label::Neutral) continue;
    ++c.counted;
    if (pred[i] == gold[i]) {
      ++c.tp;
      continue;
    }
    ++c.fn;
    if (mode == F1Mode::ThreeWay || pred[i] != Label::Neutral) ++c.fp;
  }
  return c;
}

// 2TP / (2TP + FP + FN), the harmonic mean of micro precision and recall;
// 0 when TP = 0, absent when nothing was counted.
inline std::optional<double> f1_score(const F1Counts& c) {
  if (c.counted == 0) return std::nullopt;
  if (c.tp == 0) return 0.0;
  return static_cast<double>(2 * c.tp) /
         static_cast<double>(2 * c.tp + c.fp + c.fn);
}

inline std::optional<double> per_table_f1(std::span<const Label> gold,
                                          std::span<const Label> pred,
                                          F1Mode mode) {
  return f1_score(count_f1(gold, pred, mode));
}

struct TableScore {
  std::optional<double> f1_2way;
  double f1_3way = 0.0;
  std::size_t counted_2way = 0;
  std::size_t statements = 0;
};

// Scores are fractions in [0, 1]; reports render them as percentages.
struct EvalReport {
  std::map<std::string, TableScore> per_table;
  double aggregate_2way = 0.0;
  double aggregate_3way = 0.0;
  Aggregation aggregation = Aggregation::PerTableMean;
};

namespace detail {

struct GoldPred {
  std::vector<Label> gold;
  std::vector<Label> pred;
};

// Groups (gold, predicted) label pairs by table, in dataset order.
inline std::map<std::string, GoldPred> group_by_table(
    const Dataset& d, std::span<const Prediction> preds) {
  std::map<std::string, Label> by_id;
  for (const auto& p : preds) {
    if (!by_id.emplace(p.statement_id, p.label).second)
      throw data_error("duplicate prediction for statement '" +
                       p.statement_id + "'");
  }
  std::map<std::string, GoldPred> out;
  for (const auto& s : d.statements) {
    if (!s.gold) throw data_error("statement '" + s.id + "' has no gold label");
    auto it = by_id.find(s.id);
    if (it == by_id.end())
      throw data_error("no prediction for statement '" + s.id + "'");
    auto& g = out[s.table_id];
    g.gold.push_back(*s.gold);
    g.pred.push_back(it->second);
  }
  return out;
}

}  // namespace detail

inline EvalReport evaluate(const Dataset& d, std::span<const Prediction> preds,
                           Aggregation agg = Aggregation::PerTableMean) {
  EvalReport report;
  report.aggregation = agg;
  F1Counts pooled2, pooled3;
  double sum2 = 0.0, sum3 = 0.0;
  std::size_t n2 = 0, n3 = 0;
  for (const auto& [table_id, gp] : detail::group_by_table(d, preds)) {
    auto c2 = count_f1(gp.gold, gp.pred, F1Mode::TwoWay);
    auto c3 = count_f1(gp.gold, gp.pred, F1Mode::ThreeWay);
    pooled2 += c2;
    pooled3 += c3;
    TableScore ts;
    ts.f1_2way = f1_score(c2);
    ts.f1_3way = f1_score(c3).value_or(0.0);
    ts.counted_2way = c2.counted;
    ts.statements = gp.gold.size();
    if (ts.f1_2way) {
      sum2 += *ts.f1_2way;
      ++n2;
    }
    sum3 += ts.f1_3way;
    ++n3;
    report.per_table.emplace(table_id, ts);
  }
  if (agg == Aggregation::PerTableMean) {
    report.aggregate_2way = n2 ? sum2 / static_cast<double>(n2) : 0.0;
    report.aggregate_3way = n3 ? sum3 / static_cast<double>(n3) : 0.0;
  } else {
    report.aggregate_2way = f1_score(pooled2).value_or(0.0);
    report.aggregate_3way = f1_score(pooled3).value_or(0.0);
  }
  return report;
}

// "12.34" style percentage of a fraction.
inline std::string percent2(double fraction) {
  return format_half_up(100.0 * fraction, 2);
}

inline std::string render_eval_tsv(const EvalReport& r) {
  std::string out = "table\tstatements\tcounted_2way\tf1_2way\tf1_3way\n";
  for (const auto& [id, ts] : r.per_table) {
    out += id + "\t" + std::to_string(ts.statements) + "\t" +
           std::to_string(ts.counted_2way) + "\t" +
           (ts.f1_2way ? percent2(*ts.f1_2way) : std::string("-")) + "\t" +
           percent2(ts.f1_3way) + "\n";
  }
  out += std::string("AGGREGATE(") +
         (r.aggregation == Aggregation::Global ? "global" : "per-table") +
         ")\t-\t-\t" + percent2(r.aggregate_2way) + "\t" +
         percent2(r.aggregate_3way) + "\n";
  return out;
}

// One JSON object per table followed by one aggregate record.
inline std::string render_eval_jsonl(const EvalReport& r) {
  using ordered_json = nlohmann::ordered_json;
  std::string out;
  for (const auto& [id, ts] : r.per_table) {
    ordered_json rec;
    rec["type"] = "table";
    rec["table_id"] = id;
    rec["statements"] = ts.statements;
    rec["counted_2way"] = ts.counted_2way;
    rec["f1_2way"] = ts.f1_2way ? ordered_json(*ts.f1_2way) : ordered_json();
    rec["f1_3way"] = ts.f1_3way;
    out += rec.dump() + "\n";
  }
  ordered_json agg;
  agg["type"] = "aggregate";
  agg["aggregation"] =
      r.aggregation == Aggregation::Global ? "global" : "per-table";
  agg["f1_2way"] = r.aggregate_2way;
  agg["f1_3way"] = r.aggregate_3way;
  out += agg.dump() + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Confusion matrices
// ---------------------------------------------------------------------------

struct ConfusionMatrix {
  std::vector<std::string> classes;
  // counts[gold][pred]
  std::vector<std::vector<std::size_t>> counts;

  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& row : counts)
      for (auto c : row) t += c;
    return t;
  }
  std::size_t row_sum(std::size_t i) const {
    std::size_t t = 0;
    for (auto c : counts[i]) t += c;
    return t;
  }
  std::size_t col_sum(std::size_t j) const {
    std::size_t t = 0;
    for (const auto& row : counts) t += row[j];
    return t;
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

inline ConfusionMatrix confusion(std::span<const std::string> gold,
                                 std::span<const std::string> pred,
                                 std::vector<std::string> classes) {
  if (gold.size() != pred.size())
    throw data_error("gold/prediction length mismatch");
  ConfusionMatrix m{std::move(classes), {}};
  auto index_of = [&m](const std::string& c) {
    for (std::size_t i = 0; i < m.classes.size(); ++i)
      if (m.classes[i] == c) return i;
    throw data_error("label '" + c + "' is not one of the matrix classes");
  };
  m.counts.assign(m.classes.size(), std::vector<std::size_t>(m.classes.size()));
  for (std::size_t i = 0; i < gold.size(); ++i)
    ++m.counts[index_of(gold[i])][index_of(pred[i])];
  return m;
}

inline constexpr std::string_view kNonNeutral = "non-neutral";
inline constexpr std::string_view kNeutral = "neutral";

// Neutral vs non-neutral over all statements.
inline ConfusionMatrix stage1_confusion(std::span<const Label> gold,
                                        std::span<const Label> pred) {
  std::vector<std::string> g, p;
  auto view = [](Label l) {
    return std::string(is_non_neutral(l) ? kNonNeutral : kNeutral);
  };
  for (auto l : gold) g.push_back(view(l));
  for (auto l : pred) p.push_back(view(l));
  return confusion(g, p, {std::string(kNonNeutral), std::string(kNeutral)});
}

// Refuted vs entailed over statements that are non-neutral in both gold and
// prediction.
inline ConfusionMatrix stage2_confusion(std::span<const Label> gold,
                                        std::span<const Label> pred) {
  if (gold.size() != pred.size())
    throw data_error("gold/prediction length mismatch");
  std::vector<std::string> g, p;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!is_non_neutral(gold[i]) || !is_non_neutral(pred[i])) continue;
    g.emplace_back(to_string(gold[i]));
    p.emplace_back(to_string(pred[i]));
  }
  return confusion(g, p, {"refuted", "entailed"});
}

inline ConfusionMatrix three_way_confusion(std::span<const Label> gold,
                                           std::span<const Label> pred) {
  std::vector<std::string> g, p;
  for (auto l : gold) g.emplace_back(to_string(l));
  for (auto l : pred) p.emplace_back(to_string(l));
  return confusion(g, p, {"entailed", "refuted", "neutral"});
}

struct ClassPrecisionRecall {
  std::string name;
  double precision = 0.0;  // percent
  double recall = 0.0;     // percent
};

inline std::vector<ClassPrecisionRecall> precision_recall(
    const ConfusionMatrix& m) {
  std::vector<ClassPrecisionRecall> out;
  for (std::size_t i = 0; i < m.classes.size(); ++i) {
    const auto diag = static_cast<double>(m.counts[i][i]);
    const auto row = m.row_sum(i);
    const auto col = m.col_sum(i);
    out.push_back({m.classes[i], col ? 100.0 * diag / static_cast<double>(col) : 0.0,
                   row ? 100.0 * diag / static_cast<double>(row) : 0.0});
  }
  return out;
}

// Reference rows, prediction columns, a recall column and a precision row.
inline std::string render_confusion(const ConfusionMatrix& m) {
  auto pr = precision_recall(m);
  std::string out = "reference\\prediction";
  for (const auto& c : m.classes) out += "\t" + c;
  out += "\trecall\n";
  for (std::size_t i = 0; i < m.classes.size(); ++i) {
    out += m.classes[i];
    for (auto c : m.counts[i]) out += "\t" + std::to_string(c);
    out += "\t" + format_half_up(pr[i].recall, 1) + "\n";
  }
  out += "precision";
  for (const auto& p : pr) out += "\t" + format_half_up(p.precision, 1);
  out += "\n";
  return out;
}

}  // namespace tabverify

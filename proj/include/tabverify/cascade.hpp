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
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tabverify/data_model.hpp"
#include "tabverify/error.hpp"
#include "tabverify/ingest.hpp"
#include "tabverify/metrics.hpp"
#include "tabverify/prediction.hpp"
#include "tabverify/scoring.hpp"
#include "tabverify/text.hpp"

// Two binary gates in sequence: Stage 1 separates neutral from non-neutral,
// Stage 2 separates entailed from refuted. Each stage's ensemble logit is
// the median over its models.
namespace tabverify {

struct CascadeConfig {
  double tau1 = 4.0;  // a statement is non-neutral iff stage-1 logit > tau1
  double tau2 = 4.0;  // a non-neutral statement is entailed iff stage-2 logit > tau2
};

// Even length: mean of the two middle order statistics.
inline double median(std::span<const double> xs) {
  if (xs.empty()) throw data_error("median of an empty list");
  std::vector<double> v(xs.begin(), xs.end());
  for (double x : v)
    if (!std::isfinite(x)) throw data_error("median of a non-finite value");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid),
                   v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(
      v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return lo + (hi - lo) / 2;
}

// Half the inter-quartile range. Quartiles are medians of the lower and
// upper halves; for odd sizes the overall median belongs to neither half.
inline double iqr_half(std::span<const double> xs) {
  if (xs.size() < 2) throw data_error("iqr_half needs at least 2 values");
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  const std::size_t half = v.size() / 2;
  std::span<const double> all(v);
  const double q1 = median(all.first(half));
  const double q3 = median(all.last(half));
  return (q3 - q1) / 2;
}

// Median and IQR/2 margin over repeated runs of the same configuration.
struct RunSummary {
  double median = 0.0;
  double margin = 0.0;
};

inline RunSummary summarize_runs(std::span<const double> values) {
  return {median(values), values.size() >= 2 ? iqr_half(values) : 0.0};
}

inline bool threshold_decide(double logit, double tau) { return logit > tau; }

inline Label cascade_predict(double s1, double s2, const CascadeConfig& cfg) {
  if (!threshold_decide(s1, cfg.tau1)) return Label::Neutral;
  return threshold_decide(s2, cfg.tau2) ? Label::Entailed : Label::Refuted;
}

namespace detail {

inline double ensemble_logit(std::span<const ScoreSet> sets,
                             const std::string& id, std::vector<double>& buf) {
  buf.clear();
  for (const auto& set : sets) {
    auto it = set.scores.find(id);
    if (it == set.scores.end())
      throw data_error(std::string(to_string(set.stage)) + " scores '" +
                       set.model_id + "' miss statement '" + id + "'");
    buf.push_back(it->second);
  }
  return median(buf);
}

}  // namespace detail

// Ensemble logits for every statement of `d`, in dataset order.
struct EnsembleLogits {
  std::vector<std::string> ids;
  std::vector<double> stage1;
  std::vector<double> stage2;
};

inline EnsembleLogits ensemble_logits(std::span<const ScoreSet> stage1_sets,
                                      std::span<const ScoreSet> stage2_sets,
                                      const Dataset& d) {
  if (stage1_sets.empty()) throw config_error("no stage1 score sets");
  if (stage2_sets.empty()) throw config_error("no stage2 score sets");
  EnsembleLogits out;
  std::vector<double> buf;
  for (const auto& s : d.statements) {
    out.ids.push_back(s.id);
    out.stage1.push_back(detail::ensemble_logit(stage1_sets, s.id, buf));
    out.stage2.push_back(detail::ensemble_logit(stage2_sets, s.id, buf));
  }
  return out;
}

inline std::vector<Prediction> decide_all(const EnsembleLogits& logits,
                                          const CascadeConfig& cfg) {
  std::vector<Prediction> out;
  out.reserve(logits.ids.size());
  for (std::size_t i = 0; i < logits.ids.size(); ++i) {
    out.push_back({logits.ids[i], logits.stage1[i], logits.stage2[i],
                   cascade_predict(logits.stage1[i], logits.stage2[i], cfg)});
  }
  return out;
}

inline std::vector<Prediction> predict_all(std::span<const ScoreSet> stage1_sets,
                                           std::span<const ScoreSet> stage2_sets,
                                           const CascadeConfig& cfg,
                                           const Dataset& d) {
  for (const auto& set : stage1_sets) check_coverage(set, d);
  for (const auto& set : stage2_sets) check_coverage(set, d);
  return decide_all(ensemble_logits(stage1_sets, stage2_sets, d), cfg);
}

struct SweepRow {
  double tau1 = 0.0;
  double tau2 = 0.0;
  double f1_2way = 0.0;
  double f1_3way = 0.0;
};

// Evaluates every threshold pair; rows follow grid order. The ensemble
// medians are computed once.
inline std::vector<SweepRow> sweep(std::span<const ScoreSet> stage1_sets,
                                   std::span<const ScoreSet> stage2_sets,
                                   const Dataset& d,
                                   std::span<const CascadeConfig> grid,
                                   Aggregation agg = Aggregation::PerTableMean) {
  for (const auto& set : stage1_sets) check_coverage(set, d);
  for (const auto& set : stage2_sets) check_coverage(set, d);
  const auto logits = ensemble_logits(stage1_sets, stage2_sets, d);
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (const auto& cfg : grid) {
    auto report = evaluate(d, decide_all(logits, cfg), agg);
    rows.push_back({cfg.tau1, cfg.tau2, report.aggregate_2way,
                    report.aggregate_3way});
  }
  return rows;
}

inline std::vector<CascadeConfig> threshold_grid(std::span<const double> tau1s,
                                                 std::span<const double> tau2s) {
  std::vector<CascadeConfig> grid;
  for (double t1 : tau1s)
    for (double t2 : tau2s) grid.push_back({t1, t2});
  return grid;
}

inline std::string render_sweep_tsv(std::span<const SweepRow> rows) {
  std::string out = "tau1\ttau2\tf1_2way\tf1_3way\n";
  for (const auto& r : rows) {
    out += format_logit(r.tau1) + "\t" + format_logit(r.tau2) + "\t" +
           percent2(r.f1_2way) + "\t" + percent2(r.f1_3way) + "\n";
  }
  return out;
}

}  // namespace tabverify

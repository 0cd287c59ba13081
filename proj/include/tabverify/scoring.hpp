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
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tabverify/data_model.hpp"
#include "tabverify/error.hpp"
#include "tabverify/ingest.hpp"
#include "tabverify/text.hpp"

// Stage logits. Real model outputs arrive as *.logits files; the built-in
// majority and lexical-overlap scorers let the pipeline run without models.
namespace tabverify {

// Constant logit of the majority scorer; clears any finite threshold below it.
inline constexpr double kMajorityLogit = 1e6;

// Overlap scorer constants.
inline constexpr double kOverlapScale = 8.0;
inline const std::set<std::string>& negation_lexicon() {
  static const std::set<std::string> words{"no",    "not",     "none", "never",
                                           "without", "fewer", "less"};
  return words;
}

enum class ScorerKind { ExternalFile, Majority, LexicalOverlap };

struct ScorerSpec {
  ScorerKind kind = ScorerKind::LexicalOverlap;
  Stage stage = Stage::Stage1;
  std::filesystem::path path;  // ExternalFile
  bool positive = true;        // Majority
  std::string model_id;        // defaults per kind when empty
};

inline ScoreSet score_majority(const Dataset& d, Stage stage, bool positive,
                               std::string model_id = "majority") {
  ScoreSet set{stage, std::move(model_id), {}};
  const double logit = positive ? kMajorityLogit : -kMajorityLogit;
  for (const auto& s : d.statements) set.scores.emplace(s.id, logit);
  return set;
}

inline std::set<std::string> table_tokens(const Table& t) {
  auto tokens = token_set(t.caption);
  for (const auto& h : t.header) tokens.merge(token_set(h));
  for (const auto& row : t.rows)
    for (const auto& cell : row) tokens.merge(token_set(cell));
  return tokens;
}

// Stage 1: 8 * (coverage - 0.5) where coverage is the fraction of distinct
// statement tokens found anywhere in the table (caption, header, cells).
// Stage 2: 8 * (J+ - J-), J+ the fraction of distinct statement tokens that
// are not negation words and occur in the table, J- the fraction that are
// negation words. Both land in [-8, 8].
inline double overlap_logit(const std::set<std::string>& statement,
                            const std::set<std::string>& table, Stage stage) {
  if (statement.empty()) return stage == Stage::Stage1 ? -0.5 * kOverlapScale : 0.0;
  const double n = static_cast<double>(statement.size());
  std::size_t hit = 0, positive_hit = 0, negations = 0;
  for (const auto& tok : statement) {
    const bool in_table = table.contains(tok);
    const bool negation = negation_lexicon().contains(tok);
    hit += in_table;
    negations += negation;
    positive_hit += in_table && !negation;
  }
  if (stage == Stage::Stage1) return kOverlapScale * (hit / n - 0.5);
  return kOverlapScale * (positive_hit / n - negations / n);
}

inline double score_overlap(const Statement& s, const Table& t, Stage stage) {
  return overlap_logit(token_set(s.text), table_tokens(t), stage);
}

inline ScoreSet score_overlap(const Dataset& d, Stage stage,
                              std::string model_id = "overlap") {
  ScoreSet set{stage, std::move(model_id), {}};
  std::map<std::string, std::set<std::string>> cache;
  for (const auto& s : d.statements) {
    auto it = cache.find(s.table_id);
    if (it == cache.end())
      it = cache.emplace(s.table_id, table_tokens(d.table_of(s))).first;
    set.scores.emplace(s.id, overlap_logit(token_set(s.text), it->second, stage));
  }
  return set;
}

// Throws unless `set` has exactly one logit for every statement of `d`.
inline void check_coverage(const ScoreSet& set, const Dataset& d) {
  for (const auto& s : d.statements) {
    if (!set.scores.contains(s.id))
      throw data_error(std::string(to_string(set.stage)) + " scores '" +
                       set.model_id + "' miss statement '" + s.id + "'");
  }
  if (set.scores.size() != d.statements.size()) {
    std::set<std::string> ids;
    for (const auto& s : d.statements) ids.insert(s.id);
    for (const auto& [id, v] : set.scores) {
      if (!ids.contains(id))
        throw data_error(std::string(to_string(set.stage)) + " scores '" +
                         set.model_id + "' name unknown statement '" + id + "'");
    }
  }
}

inline ScoreSet run_scorer(const ScorerSpec& spec, const Dataset& d) {
  switch (spec.kind) {
    case ScorerKind::ExternalFile: {
      if (!std::filesystem::exists(spec.path))
        throw config_error("logit file '" + spec.path.string() +
                           "' does not exist");
      return load_scoreset(spec.path, spec.stage, spec.model_id);
    }
    case ScorerKind::Majority:
      return score_majority(d, spec.stage, spec.positive,
                            spec.model_id.empty()
                                ? (spec.positive ? "majority" : "majority-neg")
                                : spec.model_id);
    case ScorerKind::LexicalOverlap:
      return score_overlap(d, spec.stage,
                           spec.model_id.empty() ? "overlap" : spec.model_id);
  }
  throw config_error("unknown scorer kind");
}

struct StageScores {
  std::vector<ScoreSet> stage1;
  std::vector<ScoreSet> stage2;
};

// Runs every scorer, groups results by stage in input order and checks that
// each set covers the dataset exactly. Logits are passed through untouched.
inline StageScores collect_scores(std::span<const ScorerSpec> specs,
                                  const Dataset& d) {
  StageScores out;
  for (const auto& spec : specs) {
    auto set = run_scorer(spec, d);
    set.stage = spec.stage;
    check_coverage(set, d);
    (spec.stage == Stage::Stage1 ? out.stage1 : out.stage2)
        .push_back(std::move(set));
  }
  if (out.stage1.empty()) throw config_error("no stage1 scorers configured");
  if (out.stage2.empty()) throw config_error("no stage2 scorers configured");
  return out;
}

}  // namespace tabverify

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
#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tabverify/data_model.hpp"
#include "tabverify/error.hpp"
#include "tabverify/ingest.hpp"
#include "tabverify/prediction.hpp"
#include "tabverify/text.hpp"

// Error analysis by statement type. Statements are bucketed into mutually
// exclusive groups by keyword; each group reports its share of the data,
// accuracy, majority-class baseline and contribution to the total error.
namespace tabverify {

inline constexpr std::string_view kOverallGroup = "Overall";
inline constexpr std::string_view kMultipleGroup = "Multiple of the above";
inline constexpr std::string_view kOtherGroup = "Other";

struct KeywordGroup {
  std::string name;
  std::set<std::string> keywords;  // lowercase single tokens
};

struct KeywordGroups {
  std::vector<KeywordGroup> groups;
};

// groups.kw syntax: "<group name>: kw, kw, ..." per line; '#' starts a comment.
inline KeywordGroups parse_keyword_groups(std::string_view text,
                                          const std::string& source = "<memory>") {
  KeywordGroups kg;
  std::set<std::string> names;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    if (is_blank(line)) return;
    auto where = source + ":" + std::to_string(line_no) + ": ";
    auto colon = line.find(':');
    if (colon == std::string_view::npos)
      throw config_error(where + "expected '<group>: keyword, keyword, ...'");
    auto trim = [](std::string_view s) {
      auto b = s.find_first_not_of(" \t");
      if (b == std::string_view::npos) return std::string();
      auto e = s.find_last_not_of(" \t");
      return std::string(s.substr(b, e - b + 1));
    };
    KeywordGroup g{trim(line.substr(0, colon)), {}};
    if (g.name.empty()) throw config_error(where + "empty group name");
    if (g.name == kOverallGroup || g.name == kMultipleGroup ||
        g.name == kOtherGroup)
      throw config_error(where + "'" + g.name + "' is a reserved group name");
    if (!names.insert(g.name).second)
      throw config_error(where + "duplicate group '" + g.name + "'");

    std::string_view rest = line.substr(colon + 1);
    while (!rest.empty()) {
      auto comma = rest.find(',');
      auto word = trim(rest.substr(0, comma));
      rest = comma == std::string_view::npos ? std::string_view()
                                             : rest.substr(comma + 1);
      if (word.empty()) continue;
      auto tokens = tokenize(word);
      if (tokens.size() != 1)
        throw config_error(where + "keyword '" + word +
                           "' is not a single word");
      g.keywords.insert(tokens.front());
    }
    if (g.keywords.empty())
      throw config_error(where + "group '" + g.name + "' has no keywords");
    kg.groups.push_back(std::move(g));
  });
  return kg;
}

inline KeywordGroups load_keyword_groups(const std::filesystem::path& path) {
  return parse_keyword_groups(read_file(path), path.string());
}

// Shipped as data/groups.kw as well; the two must stay identical.
inline constexpr std::string_view kDefaultKeywordGroups =
    R"(# Statement groups for slice analysis. One group per line:
#   <group name>: keyword, keyword, ...
# Matching is case-insensitive on whole words. A statement hitting no group
# is "Other"; one hitting two or more groups is "Multiple of the above".
Superlatives: best, worst, highest, lowest, largest, smallest, biggest, greatest, most, least, fewest, maximum, minimum, max, min, top
Aggregations: total, sum, average, mean, count, overall, combined, altogether, aggregate
Comparatives: higher, lower, better, worse, than, more, greater, larger, smaller, bigger, exceeds, exceed, outperforms, outperform
Negations: not, no, none, never, nothing, neither, nor, without, cannot, isn, aren, doesn, don, didn, wasn, weren
)";

inline const KeywordGroups& default_keyword_groups() {
  static const KeywordGroups kg =
      parse_keyword_groups(kDefaultKeywordGroups, "<default groups>");
  return kg;
}

inline std::string assign_group(std::string_view text, const KeywordGroups& kg) {
  const auto tokens = token_set(text);
  const KeywordGroup* hit = nullptr;
  std::size_t hits = 0;
  for (const auto& g : kg.groups) {
    const bool match = std::any_of(
        g.keywords.begin(), g.keywords.end(),
        [&tokens](const std::string& k) { return tokens.contains(k); });
    if (match) {
      hit = &g;
      ++hits;
    }
  }
  if (hits == 0) return std::string(kOtherGroup);
  if (hits == 1) return hit->name;
  return std::string(kMultipleGroup);
}

// ER contribution of a slice: its share of all statements times its error.
inline double error_rate_contribution(double size_pct, double acc_pct) {
  return size_pct * (1.0 - acc_pct / 100.0);
}

// One scored statement as seen by a slice view.
struct SliceItem {
  std::string text;
  std::string gold_class;
  bool correct = false;
};

struct SliceRow {
  std::string group;
  std::size_t count = 0;
  double size_pct = 0.0;
  double acc_pct = 0.0;
  double baseline_pct = 0.0;
  double er_pct = 0.0;
};

namespace detail {

struct SliceTally {
  std::size_t count = 0;
  std::size_t correct = 0;
  std::map<std::string, std::size_t> classes;

  void add(const SliceItem& item) {
    ++count;
    correct += item.correct;
    ++classes[item.gold_class];
  }

  SliceRow row(std::string name, std::size_t total) const {
    SliceRow r;
    r.group = std::move(name);
    r.count = count;
    if (count == 0 || total == 0) return r;
    std::size_t majority = 0;
    for (const auto& [cls, n] : classes) majority = std::max(majority, n);
    const auto c = static_cast<double>(count);
    r.size_pct = 100.0 * c / static_cast<double>(total);
    r.acc_pct = 100.0 * static_cast<double>(correct) / c;
    r.baseline_pct = 100.0 * static_cast<double>(majority) / c;
    r.er_pct = error_rate_contribution(r.size_pct, r.acc_pct);
    return r;
  }
};

}  // namespace detail

// Overall row first, then each configured group, "Multiple of the above" and
// "Other". Group rows partition the items.
inline std::vector<SliceRow> slice_report(std::span<const SliceItem> items,
                                          const KeywordGroups& kg) {
  detail::SliceTally overall;
  std::map<std::string, detail::SliceTally> by_group;
  for (const auto& item : items) {
    overall.add(item);
    by_group[assign_group(item.text, kg)].add(item);
  }
  std::vector<SliceRow> rows;
  const auto total = items.size();
  rows.push_back(overall.row(std::string(kOverallGroup), total));
  for (const auto& g : kg.groups) rows.push_back(by_group[g.name].row(g.name, total));
  for (auto name : {kMultipleGroup, kOtherGroup})
    rows.push_back(by_group[std::string(name)].row(std::string(name), total));
  return rows;
}

namespace detail {

inline std::map<std::string, Label> prediction_map(
    std::span<const Prediction> preds) {
  std::map<std::string, Label> out;
  for (const auto& p : preds) out.emplace(p.statement_id, p.label);
  return out;
}

inline Label predicted(const std::map<std::string, Label>& m,
                       const Statement& s) {
  if (!s.gold) throw data_error("statement '" + s.id + "' has no gold label");
  auto it = m.find(s.id);
  if (it == m.end())
    throw data_error("no prediction for statement '" + s.id + "'");
  return it->second;
}

inline std::string stage1_class(Label l) {
  return std::string(is_non_neutral(l) ? "non-neutral" : "neutral");
}

}  // namespace detail

// 3-class correctness.
inline std::vector<SliceItem> overall_items(const Dataset& d,
                                            std::span<const Prediction> preds) {
  auto m = detail::prediction_map(preds);
  std::vector<SliceItem> items;
  for (const auto& s : d.statements) {
    auto p = detail::predicted(m, s);
    items.push_back({s.text, std::string(to_string(*s.gold)), p == *s.gold});
  }
  return items;
}

inline std::vector<SliceRow> slice_report(const Dataset& d,
                                          std::span<const Prediction> preds,
                                          const KeywordGroups& kg) {
  return slice_report(overall_items(d, preds), kg);
}

struct StageSliceViews {
  std::vector<SliceRow> overall;
  std::vector<SliceRow> stage1;  // neutral vs non-neutral, all statements
  std::vector<SliceRow> stage2;  // entailed vs refuted, gold and predicted non-neutral
};

inline StageSliceViews stage_slice_views(const Dataset& d,
                                         std::span<const Prediction> preds,
                                         const KeywordGroups& kg) {
  auto m = detail::prediction_map(preds);
  std::vector<SliceItem> s1, s2;
  for (const auto& s : d.statements) {
    auto p = detail::predicted(m, s);
    s1.push_back({s.text, detail::stage1_class(*s.gold),
                  is_non_neutral(p) == is_non_neutral(*s.gold)});
    if (is_non_neutral(*s.gold) && is_non_neutral(p))
      s2.push_back({s.text, std::string(to_string(*s.gold)), p == *s.gold});
  }
  return {slice_report(d, preds, kg), slice_report(s1, kg),
          slice_report(s2, kg)};
}

struct ProbeResult {
  std::size_t count = 0;
  double size_pct = 0.0;
  double acc_pct = 0.0;  // 0 for an empty slice
  double er_pct = 0.0;
};

// Statistics for statements containing `word`; overlaps freely with groups.
inline ProbeResult keyword_probe(const Dataset& d,
                                 std::span<const Prediction> preds,
                                 std::string_view word) {
  auto tokens = tokenize(word);
  if (tokens.size() != 1)
    throw config_error("probe '" + std::string(word) + "' is not a single word");
  const auto& key = tokens.front();
  detail::SliceTally tally;
  auto items = overall_items(d, preds);
  for (const auto& item : items)
    if (token_set(item.text).contains(key)) tally.add(item);
  auto row = tally.row(key, items.size());
  return {row.count, row.size_pct, row.acc_pct, row.er_pct};
}

inline std::string render_slices_tsv(std::span<const SliceRow> rows) {
  std::string out = "group\tcount\tsize\tacc\tbaseline\ter\n";
  for (const auto& r : rows) {
    out += r.group + "\t" + std::to_string(r.count) + "\t" +
           format_half_up(r.size_pct, 1) + "\t" + format_half_up(r.acc_pct, 1) +
           "\t" + format_half_up(r.baseline_pct, 1) + "\t" +
           format_half_up(r.er_pct, 1) + "\n";
  }
  return out;
}

}  // namespace tabverify

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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "tabverify/metrics.hpp"
#include "test_support.hpp"

namespace tabverify {
namespace {

constexpr Label E = Label::Entailed;
constexpr Label R = Label::Refuted;
constexpr Label N = Label::Neutral;

using Labels = std::vector<Label>;

TEST(PerTableF1Test, ThreeWayCountsEveryStatement) {
  // TP=2 (E, N), FP=1, FN=1
  EXPECT_DOUBLE_EQ(*per_table_f1(Labels{E, R, N}, Labels{E, E, N}, F1Mode::ThreeWay),
                   2.0 / 3.0);
}

TEST(PerTableF1Test, TwoWayDropsGoldNeutral) {
  // remaining gold [E, R] vs [E, E]: TP=1, FP=1, FN=1
  EXPECT_DOUBLE_EQ(*per_table_f1(Labels{E, R, N}, Labels{E, E, N}, F1Mode::TwoWay), 0.5);
}

TEST(PerTableF1Test, NeutralPredictionIsMissWithoutFalseAlarm) {
  // P = 1/1, R = 1/2
  EXPECT_DOUBLE_EQ(*per_table_f1(Labels{E, R}, Labels{N, R}, F1Mode::TwoWay), 2.0 / 3.0);
}

TEST(PerTableF1Test, UndefinedWhenNothingToCount) {
  EXPECT_FALSE(per_table_f1(Labels{N, N}, Labels{E, N}, F1Mode::TwoWay).has_value());
  EXPECT_FALSE(per_table_f1(Labels{}, Labels{}, F1Mode::ThreeWay).has_value());
}

TEST(PerTableF1Test, ZeroWhenNoTruePositives) {
  EXPECT_EQ(*per_table_f1(Labels{E, R}, Labels{N, N}, F1Mode::TwoWay), 0.0);
  EXPECT_EQ(*per_table_f1(Labels{E, R}, Labels{R, E}, F1Mode::ThreeWay), 0.0);
}

TEST(PerTableF1Test, LengthMismatchIsAnError) {
  EXPECT_THROW(per_table_f1(Labels{E}, Labels{E, R}, F1Mode::ThreeWay), Error);
}

Labels random_labels(std::mt19937& gen, std::size_t n) {
  Labels out(n);
  for (auto& l : out) l = static_cast<Label>(gen() % 3);
  return out;
}

TEST(PerTableF1Test, MatchesBruteForceOracle) {
  std::mt19937 gen(2024);
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = gen() % 9;
    auto gold = random_labels(gen, n);
    auto pred = random_labels(gen, n);
    for (bool two_way : {false, true}) {
      auto got = per_table_f1(gold, pred, two_way ? F1Mode::TwoWay : F1Mode::ThreeWay);
      auto want = testing::oracle_f1(gold, pred, two_way);
      ASSERT_EQ(got.has_value(), want.has_value());
      if (got) {
        EXPECT_EQ(*got, *want);
      }
    }
  }
}

TEST(PerTableF1Test, ThreeWayEqualsAccuracy) {
  std::mt19937 gen(9);
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = 1 + gen() % 12;
    auto gold = random_labels(gen, n);
    auto pred = random_labels(gen, n);
    std::size_t correct = 0;
    for (std::size_t k = 0; k < n; ++k) correct += gold[k] == pred[k];
    EXPECT_DOUBLE_EQ(*per_table_f1(gold, pred, F1Mode::ThreeWay),
                     static_cast<double>(correct) / static_cast<double>(n));
  }
}

Dataset dataset_from(const std::vector<std::pair<std::string, Labels>>& tables) {
  Dataset d;
  std::size_t sid = 0;
  for (const auto& [tid, golds] : tables) {
    d.tables.emplace(tid, testing::make_table(tid, {"c"}, {{"x"}}));
    for (auto g : golds)
      d.statements.push_back({"s" + std::to_string(sid++), tid, "text", g});
  }
  return d;
}

TEST(EvaluateTest, MeanOfPerTableScores) {
  auto d = dataset_from({{"T1", {E, E, R}}, {"T2", {E, R, N}}});
  auto report = evaluate(d, testing::constant_predictions(d, E));
  EXPECT_DOUBLE_EQ(report.per_table.at("T1").f1_3way, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(report.per_table.at("T2").f1_3way, 1.0 / 3.0);
  EXPECT_EQ(percent2(report.aggregate_3way), "50.00");
  EXPECT_EQ(report.per_table.at("T2").counted_2way, 2u);
}

TEST(EvaluateTest, PerfectPredictions) {
  auto d = dataset_from({{"T1", {E, R, N}}});
  std::vector<Prediction> preds;
  for (const auto& s : d.statements) preds.push_back({s.id, 0, 0, *s.gold});
  auto report = evaluate(d, preds);
  EXPECT_EQ(percent2(report.aggregate_2way), "100.00");
  EXPECT_EQ(percent2(report.aggregate_3way), "100.00");
}

TEST(EvaluateTest, SkipsTablesWithUndefinedTwoWay) {
  auto d = dataset_from({{"T1", {E, E}}, {"T2", {N, N}}});
  auto report = evaluate(d, testing::constant_predictions(d, E));
  EXPECT_FALSE(report.per_table.at("T2").f1_2way.has_value());
  EXPECT_EQ(report.aggregate_2way, 1.0);
  EXPECT_EQ(report.aggregate_3way, 0.5);
}

TEST(EvaluateTest, GlobalAggregationPoolsCounts) {
  auto d = dataset_from({{"T1", {E}}, {"T2", {R, R, R}}});
  auto preds = testing::constant_predictions(d, E);
  EXPECT_EQ(evaluate(d, preds, Aggregation::PerTableMean).aggregate_3way, 0.5);
  EXPECT_EQ(evaluate(d, preds, Aggregation::Global).aggregate_3way, 0.25);
}

TEST(EvaluateTest, MissingGoldOrPredictionIsAnError) {
  auto d = dataset_from({{"T1", {E, R}}});
  auto preds = testing::constant_predictions(d, E);
  preds.pop_back();
  EXPECT_THROW(evaluate(d, preds), Error);
  d.statements[0].gold.reset();
  EXPECT_THROW(evaluate(d, testing::constant_predictions(d, E)), Error);
}

TEST(EvaluateTest, PermutingStatementsWithinTablesChangesNothing) {
  std::mt19937 gen(77);
  for (int i = 0; i < 50; ++i) {
    auto d = testing::random_dataset(gen);
    std::vector<Prediction> preds;
    for (const auto& s : d.statements)
      preds.push_back({s.id, 0, 0, static_cast<Label>(gen() % 3)});
    auto before = evaluate(d, preds);
    std::shuffle(d.statements.begin(), d.statements.end(), gen);
    std::shuffle(preds.begin(), preds.end(), gen);
    auto after = evaluate(d, preds);
    EXPECT_EQ(before.aggregate_2way, after.aggregate_2way);
    EXPECT_EQ(before.aggregate_3way, after.aggregate_3way);
  }
}

TEST(EvaluateTest, RenderedReports) {
  auto d = dataset_from({{"T1", {E, E, R}}, {"T2", {N}}});
  auto report = evaluate(d, testing::constant_predictions(d, E));
  EXPECT_EQ(render_eval_tsv(report),
            "table\tstatements\tcounted_2way\tf1_2way\tf1_3way\n"
            "T1\t3\t3\t66.67\t66.67\n"
            "T2\t1\t0\t-\t0.00\n"
            "AGGREGATE(per-table)\t-\t-\t66.67\t33.33\n");
  auto jsonl = render_eval_jsonl(report);
  EXPECT_NE(jsonl.find(R"("table_id":"T2","statements":1,"counted_2way":0,"f1_2way":null)"),
            std::string::npos);
}

TEST(ConfusionTest, IdenticalListsAreDiagonal) {
  Labels l{E, R, N, N, E};
  auto m = three_way_confusion(l, l);
  EXPECT_EQ(m.counts, (std::vector<std::vector<std::size_t>>{{2, 0, 0}, {0, 1, 0}, {0, 0, 2}}));
  EXPECT_EQ(m.total(), 5u);
}

TEST(ConfusionTest, StageViews) {
  Labels gold{E, R, N, E, R, N};
  Labels pred{R, N, E, E, R, N};
  auto s1 = stage1_confusion(gold, pred);
  // non-neutral gold: E->R(nn), R->N, E->E, R->R ; neutral gold: N->E, N->N
  EXPECT_EQ(s1.counts, (std::vector<std::vector<std::size_t>>{{3, 1}, {1, 1}}));
  auto s2 = stage2_confusion(gold, pred);
  EXPECT_EQ(s2.classes, (std::vector<std::string>{"refuted", "entailed"}));
  EXPECT_EQ(s2.counts, (std::vector<std::vector<std::size_t>>{{1, 0}, {1, 1}}));
  EXPECT_EQ(s2.total(), 3u);
}

TEST(ConfusionTest, UnknownClassIsAnError) {
  std::vector<std::string> g{"a"}, p{"z"};
  EXPECT_THROW(confusion(g, p, {"a", "b"}), Error);
}

TEST(PrecisionRecallTest, DiagonalIsPerfect) {
  ConfusionMatrix m{{"a", "b"}, {{10, 0}, {0, 10}}};
  for (const auto& c : precision_recall(m)) {
    EXPECT_EQ(c.precision, 100.0);
    EXPECT_EQ(c.recall, 100.0);
  }
}

TEST(PrecisionRecallTest, EmptyRowsAndColumnsGiveZero) {
  ConfusionMatrix m{{"a", "b"}, {{3, 0}, {0, 0}}};
  auto pr = precision_recall(m);
  EXPECT_EQ(pr[1].precision, 0.0);
  EXPECT_EQ(pr[1].recall, 0.0);
}

TEST(PrecisionRecallTest, RenderedLayout) {
  ConfusionMatrix m{{"non-neutral", "neutral"}, {{449, 14}, {58, 35}}};
  EXPECT_EQ(render_confusion(m),
            "reference\\prediction\tnon-neutral\tneutral\trecall\n"
            "non-neutral\t449\t14\t97.0\n"
            "neutral\t58\t35\t37.6\n"
            "precision\t88.6\t71.4\n");
}

TEST(FormatHalfUpTest, RoundsHalvesUp) {
  EXPECT_EQ(format_half_up(1.55, 1), "1.6");
  EXPECT_EQ(format_half_up(0.125, 2), "0.13");
  EXPECT_EQ(format_half_up(2.675, 2), "2.68");
  EXPECT_EQ(format_half_up(-0.0001, 2), "0.00");
  EXPECT_EQ(format_half_up(66.666666, 2), "66.67");
}

}  // namespace
}  // namespace tabverify

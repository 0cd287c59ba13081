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

#include "tabverify/data_model.hpp"
#include "test_support.hpp"

namespace tabverify {
namespace {

using testing::two_table_dataset;

TEST(LabelTest, RoundTripsThroughStrings) {
  for (Label l : {Label::Entailed, Label::Refuted, Label::Neutral}) {
    EXPECT_EQ(parse_label(to_string(l)), l);
  }
}

TEST(LabelTest, ParsingIsCaseInsensitive) {
  EXPECT_EQ(parse_label("ENTAILED"), Label::Entailed);
  EXPECT_EQ(parse_label("Refuted"), Label::Refuted);
  EXPECT_EQ(parse_label("Unknown"), Label::Neutral);
  EXPECT_FALSE(parse_label("maybe").has_value());
  EXPECT_FALSE(parse_label("").has_value());
}

TEST(ValidateDatasetTest, WellFormedDatasetHasNoViolations) {
  EXPECT_TRUE(validate_dataset(two_table_dataset()).empty());
}

TEST(ValidateDatasetTest, DanglingTableReference) {
  auto d = two_table_dataset();
  d.statements.push_back({"s9", "tX", "text", Label::Neutral});
  auto v = validate_dataset(d);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, "dangling-table-ref");
  EXPECT_EQ(v[0].id, "s9");
}

TEST(ValidateDatasetTest, RaggedRow) {
  auto d = two_table_dataset();
  d.tables.at("t1").rows[1].pop_back();
  auto v = validate_dataset(d);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, "ragged-row");
  EXPECT_EQ(v[0].id, "t1");
}

TEST(ValidateDatasetTest, ReportsEveryRuleSeparately) {
  auto d = two_table_dataset();
  d.tables.at("t2").header.clear();
  d.tables.at("t2").rows.clear();
  d.statements.push_back({"s1", "t1", "", std::nullopt});
  d.statements.push_back({"bad id", "t1", "x", std::nullopt});
  std::vector<std::string> rules;
  for (const auto& v : validate_dataset(d)) rules.push_back(v.rule);
  EXPECT_EQ(rules, (std::vector<std::string>{"empty-header", "duplicate-id",
                                             "empty-text", "whitespace-in-id"}));
}

TEST(ValidateDatasetTest, TableKeyMustMatchId) {
  auto d = two_table_dataset();
  d.tables.at("t2").id = "other";
  auto v = validate_dataset(d);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, "key-mismatch");
}

TEST(CanonicalTest, SortsStatementsById) {
  auto d = two_table_dataset();
  std::swap(d.statements[0], d.statements[2]);
  auto c = canonical(d);
  EXPECT_EQ(c.statements[0].id, "s1");
  EXPECT_EQ(c.statements[2].id, "s3");
  EXPECT_EQ(canonical(c), c);
}

TEST(CellCoordTest, BoundsAgainstBodyRows) {
  auto t = two_table_dataset().tables.at("t1");
  EXPECT_TRUE(in_bounds(t, {1, 2}));
  EXPECT_FALSE(in_bounds(t, {2, 0}));  // header row is not addressable
  EXPECT_FALSE(in_bounds(t, {0, 3}));
}

}  // namespace
}  // namespace tabverify

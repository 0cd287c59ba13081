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

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tabverify/data_model.hpp"
#include "tabverify/error.hpp"
#include "tabverify/ingest.hpp"

namespace tabverify {

// Cascade output for one statement. The logits are the ensemble values.
struct Prediction {
  std::string statement_id;
  double stage1_logit = 0.0;
  double stage2_logit = 0.0;
  Label label = Label::Neutral;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

// *.pred: "<statement_id> <label> <s1_logit> <s2_logit>" per line.
inline std::string serialize_predictions(const std::vector<Prediction>& preds) {
  std::string out;
  for (const auto& p : preds) {
    out += p.statement_id;
    out += ' ';
    out += to_string(p.label);
    out += ' ';
    out += format_logit(p.stage1_logit);
    out += ' ';
    out += format_logit(p.stage2_logit);
    out += '\n';
  }
  return out;
}

inline std::vector<Prediction> parse_predictions(
    std::string_view text, const std::string& source = "<memory>") {
  std::vector<Prediction> out;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (is_blank(line)) return;
    auto where = source + ":" + std::to_string(line_no) + ": ";
    std::istringstream fields{std::string(line)};
    std::string id, label, s1, s2, extra;
    if (!(fields >> id >> label >> s1 >> s2) || (fields >> extra))
      throw data_error(where + "expected '<id> <label> <s1_logit> <s2_logit>'");
    auto l = parse_label(label);
    if (!l) throw data_error(where + "unknown label '" + label + "'");
    auto v1 = parse_double(s1);
    auto v2 = parse_double(s2);
    if (!v1 || !v2 || !std::isfinite(*v1) || !std::isfinite(*v2))
      throw data_error(where + "malformed or non-finite logit");
    out.push_back({id, *v1, *v2, *l});
  });
  return out;
}

inline std::vector<Prediction> load_predictions(
    const std::filesystem::path& path) {
  return parse_predictions(read_file(path), path.string());
}

}  // namespace tabverify

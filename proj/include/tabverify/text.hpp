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
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tabverify {

// Lowercased maximal runs of ASCII alphanumerics. Bytes >= 0x80 (UTF-8
// sequences) are kept inside tokens so non-ASCII words survive intact.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      cur += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline std::set<std::string> token_set(std::string_view text) {
  auto tokens = tokenize(text);
  return {tokens.begin(), tokens.end()};
}

// Fixed-point rendering with round-half-up. A relative nudge keeps values
// such as 1.55 (stored as 1.5499999...) on the intended side.
inline std::string format_half_up(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double scaled = value * scale;
  const double nudge = 1e-9 * std::max(1.0, std::fabs(scaled));
  double rounded = scaled >= 0 ? std::floor(scaled + 0.5 + nudge)
                               : -std::floor(-scaled + 0.5 - nudge);
  if (rounded == 0) rounded = 0;  // no "-0.00"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, rounded / scale);
  return buf;
}

inline double round_half_up(double value, int decimals) {
  return std::stod(format_half_up(value, decimals));
}

}  // namespace tabverify

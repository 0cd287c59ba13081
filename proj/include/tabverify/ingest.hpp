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

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "tabverify/data_model.hpp"
#include "tabverify/error.hpp"

// File formats:
//   *.tvd     one JSON object per line; "type" is "table" or "statement".
//   *.logits  "<statement_id> <logit>" per line, one model per file.
//   *.evd     one JSON object per line with statement_id, model_id,
//             predicted_label and cells [[row, col], ...].
namespace tabverify {

struct ScoreSet {
  Stage stage = Stage::Stage1;
  std::string model_id;
  std::map<std::string, double> scores;

  std::size_t size() const { return scores.size(); }

  friend bool operator==(const ScoreSet&, const ScoreSet&) = default;
};

// ---------------------------------------------------------------------------
// Low-level file helpers
// ---------------------------------------------------------------------------

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw io_error("read failed for '" + path.string() + "'");
  return buf.str();
}

// Writes to a sibling temporary file and renames it over the target, so a
// reader never observes a partially written output.
inline void atomic_write(const std::filesystem::path& path,
                         std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec)
      throw io_error("cannot create directory '" +
                     path.parent_path().string() + "': " + ec.message());
  }
  auto tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw io_error("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw io_error("cannot rename onto '" + path.string() + "': " +
                   ec.message());
  }
}

// Splits on '\n', dropping a trailing '\r'. Line numbers are 1-based.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(++line_no, line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

inline bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

// Shortest decimal that parses back to exactly the same double.
inline std::string format_logit(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view token) {
  double value = 0.0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec == std::errc::result_out_of_range)
    return std::numeric_limits<double>::infinity();
  if (res.ec != std::errc() || res.ptr != token.data() + token.size())
    return std::nullopt;
  return value;
}

// ---------------------------------------------------------------------------
// Dataset (*.tvd)
// ---------------------------------------------------------------------------

struct DatasetLoad {
  Dataset dataset;
  std::size_t records = 0;   // non-blank lines seen
  std::size_t accepted = 0;  // records that made it into `dataset`
  std::vector<std::string> errors;  // one per rejected record
};

namespace detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline void check_keys(const json& obj,
                       std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw data_error("unknown field \"" + key + "\"");
  }
}

inline const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw data_error(std::string("missing required field \"") + key + "\"");
  return *it;
}

inline std::string require_string(const json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_string())
    throw data_error(std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

inline std::vector<std::string> string_array(const json& v, const char* what) {
  if (!v.is_array())
    throw data_error(std::string(what) + " must be an array of strings");
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_string())
      throw data_error(std::string(what) + " must be an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

inline Table parse_table_record(const json& obj) {
  check_keys(obj, {"type", "id", "caption", "header", "rows"});
  Table t;
  t.id = require_string(obj, "id");
  if (auto it = obj.find("caption"); it != obj.end()) {
    if (!it->is_string()) throw data_error("field \"caption\" must be a string");
    t.caption = it->get<std::string>();
  }
  const auto& rows = require(obj, "rows");
  if (!rows.is_array()) throw data_error("field \"rows\" must be an array");
  for (const auto& row : rows) t.rows.push_back(string_array(row, "each row"));

  const auto& header = require(obj, "header");
  if (header.is_null()) {
    // Headerless table: synthesize stable column names.
    if (t.rows.empty())
      throw data_error("\"header\" is null and there are no rows to size it");
    for (std::size_t c = 0; c < t.rows.front().size(); ++c)
      t.header.push_back("col" + std::to_string(c));
  } else {
    t.header = string_array(header, "field \"header\"");
  }
  return t;
}

inline Statement parse_statement_record(const json& obj) {
  check_keys(obj, {"type", "id", "table_id", "text", "gold"});
  Statement s;
  s.id = require_string(obj, "id");
  s.table_id = require_string(obj, "table_id");
  s.text = require_string(obj, "text");
  if (auto it = obj.find("gold"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw data_error("field \"gold\" must be a string");
    auto label = parse_label(it->get<std::string>());
    if (!label)
      throw data_error("unknown label \"" + it->get<std::string>() + "\"");
    s.gold = *label;
  }
  return s;
}

}  // namespace detail

// Lenient reader: every malformed record is reported and skipped, never
// silently dropped. records == accepted + errors.size().
inline DatasetLoad read_dataset(std::string_view text) {
  DatasetLoad out;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (is_blank(line)) return;
    ++out.records;
    try {
      detail::json obj;
      try {
        obj = detail::json::parse(line);
      } catch (const detail::json::parse_error& e) {
        throw data_error(std::string("malformed record: ") + e.what());
      }
      if (!obj.is_object()) throw data_error("record is not an object");
      auto type = detail::require_string(obj, "type");
      if (type == "table") {
        auto t = detail::parse_table_record(obj);
        auto id = t.id;
        if (!out.dataset.tables.emplace(id, std::move(t)).second)
          throw data_error("duplicate table id '" + id + "'");
      } else if (type == "statement") {
        out.dataset.statements.push_back(detail::parse_statement_record(obj));
      } else {
        throw data_error("unknown record type \"" + type + "\"");
      }
      ++out.accepted;
    } catch (const Error& e) {
      out.errors.push_back("line " + std::to_string(line_no) + ": " +
                           e.what());
    }
  });
  return out;
}

inline std::string describe(const std::vector<Violation>& violations) {
  std::string msg;
  for (const auto& v : violations) {
    if (!msg.empty()) msg += "; ";
    msg += v.rule + " [" + v.id + "]: " + v.message;
  }
  return msg;
}

// Strict reader: throws on any parse error or invariant violation.
inline Dataset parse_dataset(std::string_view text,
                             const std::string& source = "<memory>") {
  auto load = read_dataset(text);
  if (!load.errors.empty()) {
    std::string msg = source + ": ";
    for (std::size_t i = 0; i < load.errors.size(); ++i)
      msg += (i ? "; " : "") + load.errors[i];
    throw data_error(msg);
  }
  if (auto violations = validate_dataset(load.dataset); !violations.empty())
    throw data_error(source + ": invalid dataset: " + describe(violations));
  return std::move(load.dataset);
}

inline Dataset load_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_file(path), path.string());
}

// Canonical text: tables then statements, each sorted by id, keys in a
// fixed order, one record per line.
inline std::string serialize_dataset(const Dataset& d) {
  std::string out;
  auto emit = [&out](const detail::ordered_json& rec) {
    try {
      out += rec.dump(-1, ' ', false, detail::json::error_handler_t::strict);
    } catch (const detail::json::type_error& e) {
      throw data_error(std::string("cannot serialize record: ") + e.what());
    }
    out += '\n';
  };
  for (const auto& [id, t] : d.tables) {
    detail::ordered_json rec;
    rec["type"] = "table";
    rec["id"] = t.id;
    rec["caption"] = t.caption;
    rec["header"] = t.header;
    rec["rows"] = t.rows;
    emit(rec);
  }
  std::vector<const Statement*> order;
  order.reserve(d.statements.size());
  for (const auto& s : d.statements) order.push_back(&s);
  std::stable_sort(order.begin(), order.end(),
                   [](auto* a, auto* b) { return a->id < b->id; });
  for (const auto* s : order) {
    detail::ordered_json rec;
    rec["type"] = "statement";
    rec["id"] = s->id;
    rec["table_id"] = s->table_id;
    rec["text"] = s->text;
    if (s->gold) rec["gold"] = std::string(to_string(*s->gold));
    emit(rec);
  }
  return out;
}

inline void write_dataset(const Dataset& d, const std::filesystem::path& path) {
  atomic_write(path, serialize_dataset(d));
}

// ---------------------------------------------------------------------------
// Logits (*.logits)
// ---------------------------------------------------------------------------

inline ScoreSet parse_scoreset(std::string_view text, Stage stage,
                               std::string model_id,
                               const std::string& source = "<memory>") {
  ScoreSet set{stage, std::move(model_id), {}};
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (is_blank(line)) return;
    auto where = source + ":" + std::to_string(line_no) + ": ";
    std::istringstream fields{std::string(line)};
    std::string id, value, extra;
    if (!(fields >> id >> value) || (fields >> extra))
      throw data_error(where + "expected '<statement_id> <logit>'");
    auto logit = parse_double(value);
    if (!logit) throw data_error(where + "malformed logit '" + value + "'");
    if (!std::isfinite(*logit))
      throw data_error(where + "non-finite logit for '" + id + "'");
    if (!set.scores.emplace(id, *logit).second)
      throw data_error(where + "duplicate statement id '" + id + "'");
  });
  return set;
}

inline ScoreSet load_scoreset(const std::filesystem::path& path, Stage stage,
                              std::string model_id = {}) {
  if (model_id.empty()) model_id = path.stem().string();
  return parse_scoreset(read_file(path), stage, std::move(model_id),
                        path.string());
}

// Lines follow `order` when given (typically dataset order), else id order.
inline std::string serialize_scoreset(
    const ScoreSet& set, const std::vector<std::string>& order = {}) {
  std::string out;
  auto line = [&out](const std::string& id, double v) {
    out += id;
    out += ' ';
    out += format_logit(v);
    out += '\n';
  };
  if (order.empty()) {
    for (const auto& [id, v] : set.scores) line(id, v);
  } else {
    for (const auto& id : order) line(id, set.scores.at(id));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evidence predictions (*.evd)
// ---------------------------------------------------------------------------

inline std::vector<EvidencePrediction> parse_evidence_predictions(
    std::string_view text, const Dataset& d,
    const std::string& source = "<memory>") {
  std::map<std::string, const Statement*> by_id;
  for (const auto& s : d.statements) by_id.emplace(s.id, &s);

  std::vector<EvidencePrediction> out;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (is_blank(line)) return;
    auto where = source + ":" + std::to_string(line_no) + ": ";
    try {
      detail::json obj;
      try {
        obj = detail::json::parse(line);
      } catch (const detail::json::parse_error& e) {
        throw data_error(std::string("malformed record: ") + e.what());
      }
      if (!obj.is_object()) throw data_error("record is not an object");
      detail::check_keys(
          obj, {"statement_id", "model_id", "predicted_label", "cells"});
      EvidencePrediction p;
      p.statement_id = detail::require_string(obj, "statement_id");
      p.model_id = detail::require_string(obj, "model_id");
      auto label_text = detail::require_string(obj, "predicted_label");
      auto label = parse_label(label_text);
      if (!label || *label == Label::Neutral)
        throw data_error("predicted_label must be entailed or refuted, got \"" +
                         label_text + "\"");
      p.predicted_label = *label;

      auto it = by_id.find(p.statement_id);
      if (it == by_id.end())
        throw data_error("unknown statement id '" + p.statement_id + "'");
      const Table& table = d.table_of(*it->second);

      const auto& cells = detail::require(obj, "cells");
      if (!cells.is_array()) throw data_error("\"cells\" must be an array");
      for (const auto& cell : cells) {
        if (!cell.is_array() || cell.size() != 2 ||
            !cell[0].is_number_unsigned() || !cell[1].is_number_unsigned())
          throw data_error("each cell must be [row, col] with row, col >= 0");
        CellCoord c{cell[0].get<std::size_t>(), cell[1].get<std::size_t>()};
        if (!in_bounds(table, c))
          throw data_error("cell (" + std::to_string(c.row) + "," +
                           std::to_string(c.col) + ") out of bounds for table '" +
                           table.id + "' (" + std::to_string(table.num_rows()) +
                           "x" + std::to_string(table.num_columns()) + ")");
        p.cells.insert(c);
      }
      out.push_back(std::move(p));
    } catch (const Error& e) {
      throw data_error(where + e.what());
    }
  });
  return out;
}

inline std::vector<EvidencePrediction> load_evidence_predictions(
    const std::filesystem::path& path, const Dataset& d) {
  return parse_evidence_predictions(read_file(path), d, path.string());
}

inline std::string serialize_evidence_predictions(
    const std::vector<EvidencePrediction>& preds) {
  std::string out;
  for (const auto& p : preds) {
    detail::ordered_json rec;
    rec["statement_id"] = p.statement_id;
    rec["model_id"] = p.model_id;
    rec["predicted_label"] = std::string(to_string(p.predicted_label));
    auto cells = detail::ordered_json::array();
    for (const auto& c : p.cells) cells.push_back({c.row, c.col});
    rec["cells"] = std::move(cells);
    out += rec.dump(-1, ' ', false, detail::json::error_handler_t::strict);
    out += '\n';
  }
  return out;
}

}  // namespace tabverify

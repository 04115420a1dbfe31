// Copyright 2026 The judgekit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Versioned JSONL files.
//
// Every file written by the toolkit starts with a header record
//
//   {"schema": "<family>.v<major>", "version": "<major>.<minor>"}
//
// Readers accept any minor version of a major they know and reject newer
// majors. Records follow, one JSON object per line.

#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "judgekit/errors.hpp"
#include "judgekit/preference_pair.hpp"

namespace judgekit {

using json = nlohmann::json;

// Highest schema major version this build reads.
inline constexpr int kSupportedMajor = 1;

inline json make_header(std::string_view family, const json& extra = json::object()) {
  json h = extra;
  h["schema"] = std::string(family) + ".v1";
  h["version"] = "1.0";
  return h;
}

inline bool is_header(const json& j) { return j.is_object() && j.contains("schema"); }

namespace detail {

inline int leading_int(std::string_view s) {
  int v = -1;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

}  // namespace detail

// Throws FormatError unless `header` declares `family` at a readable version.
inline void check_header(const json& header, std::string_view family) {
  if (!header.contains("schema") || !header["schema"].is_string()) {
    throw FormatError("missing schema header");
  }
  const std::string schema = header["schema"].get<std::string>();
  const std::size_t dot = schema.rfind(".v");
  if (dot == std::string::npos) throw FormatError("malformed schema name '" + schema + "'");
  if (schema.substr(0, dot) != family) {
    throw FormatError("expected a " + std::string(family) + " file, got '" + schema + "'");
  }
  int major = detail::leading_int(std::string_view(schema).substr(dot + 2));
  if (header.contains("version") && header["version"].is_string()) {
    const int vmajor = detail::leading_int(header["version"].get<std::string>());
    if (vmajor > major) major = vmajor;
  }
  if (major < 1) throw FormatError("malformed schema version in '" + schema + "'");
  if (major > kSupportedMajor) {
    throw FormatError("schema '" + schema + "' has major version " + std::to_string(major) +
                      "; this build reads up to " + std::to_string(kSupportedMajor));
  }
}

struct JsonLine {
  std::size_t line_no = 0;
  std::string text;
};

inline std::vector<JsonLine> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<JsonLine> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back({n, line});
  }
  if (in.bad()) throw IoError("read error on '" + path + "'");
  return out;
}

struct JsonlFile {
  std::optional<json> header;
  std::vector<json> records;
};

// Reads a toolkit-written file. The header is mandatory.
inline JsonlFile read_jsonl(const std::string& path, std::string_view family) {
  JsonlFile f;
  for (const auto& line : read_lines(path)) {
    json j;
    try {
      j = json::parse(line.text);
    } catch (const json::parse_error& e) {
      throw FormatError(path + ":" + std::to_string(line.line_no) + ": " + e.what());
    }
    if (!f.header) {
      if (!is_header(j)) {
        throw FormatError(path + ": first record is not a schema header");
      }
      check_header(j, family);
      f.header = std::move(j);
      continue;
    }
    f.records.push_back(std::move(j));
  }
  if (!f.header) throw FormatError(path + ": empty file, expected a " + std::string(family) + " header");
  return f;
}

inline std::string to_jsonl(const std::vector<json>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

inline void write_text(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write error on '" + path + "'");
}

inline void write_jsonl(const std::string& path, const std::vector<json>& records) {
  write_text(path, to_jsonl(records));
}

// pair.v1 ----------------------------------------------------------------

inline constexpr const char* kPairFamily = "pair";

inline json to_json(const PreferencePair& p) {
  json j = {{"id", p.id},
            {"query", p.query},
            {"response_a", p.response_a},
            {"response_b", p.response_b},
            {"label", std::string(to_string(p.label))},
            {"kind", std::string(to_string(p.kind))},
            {"source", std::string(to_string(p.source))}};
  j["ground_truth"] = p.ground_truth ? json(*p.ground_truth) : json(nullptr);
  if (!p.subset.empty()) j["subset"] = p.subset;
  return j;
}

namespace detail {

inline std::string require_string(const json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  if (!j[key].is_string()) throw FormatError(std::string("field '") + key + "' is not a string");
  return j[key].get<std::string>();
}

}  // namespace detail

// Parses and validates one pair.v1 record; throws FormatError.
inline PreferencePair pair_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("record is not an object");
  static const char* kKnown[] = {"id",   "query",  "response_a",   "response_b", "label",
                                 "kind", "source", "ground_truth", "subset"};
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* k : kKnown) known = known || key == k;
    if (!known) throw FormatError("unknown field '" + key + "'");
  }
  PreferencePair p;
  p.id = detail::require_string(j, "id");
  p.query = detail::require_string(j, "query");
  p.response_a = detail::require_string(j, "response_a");
  p.response_b = detail::require_string(j, "response_b");
  try {
    p.label = parse_verdict(detail::require_string(j, "label"));
    p.kind = parse_task_kind(detail::require_string(j, "kind"));
    if (j.contains("source")) p.source = parse_source(detail::require_string(j, "source"));
  } catch (const InputError& e) {
    throw FormatError(e.what());
  }
  if (j.contains("ground_truth") && !j["ground_truth"].is_null()) {
    p.ground_truth = detail::require_string(j, "ground_truth");
  }
  if (j.contains("subset")) p.subset = detail::require_string(j, "subset");
  try {
    validate(p);
  } catch (const InputError& e) {
    throw FormatError(e.what());
  }
  return p;
}

inline std::vector<PreferencePair> read_pairs(const std::string& path) {
  std::vector<PreferencePair> out;
  const JsonlFile f = read_jsonl(path, kPairFamily);
  out.reserve(f.records.size());
  for (std::size_t i = 0; i < f.records.size(); ++i) {
    try {
      out.push_back(pair_from_json(f.records[i]));
    } catch (const FormatError& e) {
      throw FormatError(path + ": record " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

inline void write_pairs(const std::string& path, const std::vector<PreferencePair>& pairs) {
  std::vector<json> rec;
  rec.reserve(pairs.size() + 1);
  rec.push_back(make_header(kPairFamily, {{"count", pairs.size()}}));
  for (const auto& p : pairs) rec.push_back(to_json(p));
  write_jsonl(path, rec);
}

}  // namespace judgekit

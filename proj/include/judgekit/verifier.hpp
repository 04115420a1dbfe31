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

// Rule-based answer equivalence for objective tasks.
//
// Answers are canonicalized into either an exact rational (integers,
// decimals, a/b, \frac{a}{b}) or a normalized string. Two numbers match
// exactly, or within 1e-6 when either side was written as a decimal.
// Strings match after normalization. There is no symbolic algebra.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "judgekit/errors.hpp"

namespace judgekit {

using Rational = boost::multiprecision::cpp_rational;

struct CanonicalAnswer {
  enum class Kind { number, string };

  Kind kind = Kind::string;
  std::optional<Rational> numeric_value;
  std::string normalized_text;
  // Set when the numeric form came from a literal with a decimal point.
  bool from_decimal = false;

  bool operator==(const CanonicalAnswer&) const = default;
};

namespace detail {

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }
inline bool ends_with(std::string_view s, std::string_view p) {
  return s.size() >= p.size() && s.substr(s.size() - p.size()) == p;
}

// Index of the '}' closing the '{' at `open`, or npos.
inline std::size_t matching_brace(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    if (s[i] == '{') {
      ++depth;
    } else if (s[i] == '}' && --depth == 0) {
      return i;
    }
  }
  return std::string_view::npos;
}

// Strips one layer of a wrapper that spans the whole string.
inline bool strip_wrapper(std::string& s) {
  std::string_view v = s;
  static constexpr std::array<std::string_view, 7> kCommands = {
      "\\boxed{", "\\fbox{", "\\text{", "\\textbf{", "\\mathrm{", "\\mathbf{", "\\textrm{"};
  for (std::string_view cmd : kCommands) {
    if (starts_with(v, cmd) && matching_brace(v, cmd.size() - 1) == v.size() - 1) {
      s = std::string(v.substr(cmd.size(), v.size() - cmd.size() - 1));
      return true;
    }
  }
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 4> kDelims = {{
      {"$$", "$$"}, {"\\(", "\\)"}, {"\\[", "\\]"}, {"$", "$"}}};
  for (auto [open, close] : kDelims) {
    if (v.size() >= open.size() + close.size() && starts_with(v, open) && ends_with(v, close)) {
      s = std::string(v.substr(open.size(), v.size() - open.size() - close.size()));
      return true;
    }
  }
  return false;
}

inline void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t at = 0;
  while ((at = s.find(from, at)) != std::string::npos) {
    s.replace(at, from.size(), to);
    at += to.size();
  }
}

// [+-]? digits{1,3} (, digits{3})+ (. digits+)?
inline bool has_thousands_separators(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t lead = 0;
  while (i < s.size() && is_digit(s[i])) ++i, ++lead;
  if (lead < 1 || lead > 3) return false;
  int groups = 0;
  while (i < s.size() && s[i] == ',') {
    ++i;
    for (int k = 0; k < 3; ++k, ++i) {
      if (i >= s.size() || !is_digit(s[i])) return false;
    }
    ++groups;
  }
  if (groups == 0) return false;
  if (i < s.size() && s[i] == '.') {
    ++i;
    if (i >= s.size()) return false;
    while (i < s.size() && is_digit(s[i])) ++i;
  }
  return i == s.size();
}

inline std::string normalize_step(std::string s) {
  s = std::string(trim(s));
  while (strip_wrapper(s)) s = std::string(trim(s));

  replace_all(s, "\\dfrac", "\\frac");
  replace_all(s, "\\tfrac", "\\frac");
  replace_all(s, "\\left", "");
  replace_all(s, "\\right", "");
  replace_all(s, "{,}", ",");
  for (std::string_view sp : {"\\!", "\\,", "\\;", "\\:"}) replace_all(s, sp, "");

  std::string collapsed;
  collapsed.reserve(s.size());
  bool in_space = false;
  for (char c : s) {
    if (is_space(c)) {
      in_space = true;
      continue;
    }
    if (in_space && !collapsed.empty()) collapsed.push_back(' ');
    in_space = false;
    collapsed.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  while (!collapsed.empty() && (collapsed.back() == '.' || collapsed.back() == ' ')) {
    collapsed.pop_back();
  }

  if (has_thousands_separators(collapsed)) replace_all(collapsed, ",", "");

  // Multiple-choice letters: "(c)" and "c)" both become "c".
  if (collapsed.size() == 3 && collapsed[0] == '(' && collapsed[2] == ')' &&
      std::isalpha(static_cast<unsigned char>(collapsed[1]))) {
    collapsed = collapsed.substr(1, 1);
  } else if (collapsed.size() == 2 && collapsed[1] == ')' &&
             std::isalpha(static_cast<unsigned char>(collapsed[0]))) {
    collapsed = collapsed.substr(0, 1);
  }
  return collapsed;
}

// [+-]? digits, or nullopt on anything else.
inline std::optional<Rational> parse_integer(std::string_view s) {
  s = trim(s);
  bool neg = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) return std::nullopt;
  boost::multiprecision::cpp_int v = 0;
  for (char c : s) {
    if (!is_digit(c)) return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return Rational(neg ? -v : v);
}

// [+-]? (digits [. digits*] | . digits)
inline std::optional<Rational> parse_decimal(std::string_view s, bool& has_point) {
  bool neg = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  boost::multiprecision::cpp_int num = 0;
  boost::multiprecision::cpp_int den = 1;
  std::size_t digits = 0;
  has_point = false;
  for (char c : s) {
    if (c == '.') {
      if (has_point) return std::nullopt;
      has_point = true;
    } else if (is_digit(c)) {
      num = num * 10 + (c - '0');
      if (has_point) den *= 10;
      ++digits;
    } else {
      return std::nullopt;
    }
  }
  if (digits == 0) return std::nullopt;
  Rational r(num, den);
  return neg ? Rational(-r) : r;
}

inline std::optional<Rational> ratio(const std::optional<Rational>& n,
                                     const std::optional<Rational>& d) {
  if (!n || !d || *d == 0) return std::nullopt;
  return Rational(*n / *d);
}

// \frac{a}{b} with an optional leading sign.
inline std::optional<Rational> parse_latex_fraction(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    neg = s[0] == '-';
    s = trim(s.substr(1));
  }
  if (!starts_with(s, "\\frac")) return std::nullopt;
  s.remove_prefix(5);
  s = trim(s);
  std::optional<Rational> value;
  if (!s.empty() && s[0] == '{') {
    const std::size_t close_n = matching_brace(s, 0);
    if (close_n == std::string_view::npos) return std::nullopt;
    std::string_view rest = trim(s.substr(close_n + 1));
    if (rest.empty() || rest[0] != '{' || matching_brace(rest, 0) != rest.size() - 1) {
      return std::nullopt;
    }
    value = ratio(parse_integer(s.substr(1, close_n - 1)),
                  parse_integer(rest.substr(1, rest.size() - 2)));
  } else if (s.size() == 2 && is_digit(s[0]) && is_digit(s[1])) {
    // \frac12
    value = ratio(Rational(s[0] - '0'), Rational(s[1] - '0'));
  }
  if (!value) return std::nullopt;
  return neg ? Rational(-*value) : *value;
}

inline std::optional<Rational> parse_slash_fraction(std::string_view s) {
  const std::size_t slash = s.find('/');
  if (slash == std::string_view::npos || s.find('/', slash + 1) != std::string_view::npos) {
    return std::nullopt;
  }
  return ratio(parse_integer(s.substr(0, slash)), parse_integer(s.substr(slash + 1)));
}

}  // namespace detail

inline CanonicalAnswer normalize_answer(std::string_view text) {
  std::string s(text);
  // Iterate to a fixpoint so that normalization is idempotent by construction.
  for (int guard = 0; guard < 16; ++guard) {
    std::string next = detail::normalize_step(s);
    if (next == s) break;
    s = std::move(next);
  }

  CanonicalAnswer out;
  out.normalized_text = s;
  bool has_point = false;
  if (auto d = detail::parse_decimal(s, has_point)) {
    out.kind = CanonicalAnswer::Kind::number;
    out.numeric_value = std::move(d);
    out.from_decimal = has_point;
  } else if (auto f = detail::parse_latex_fraction(s)) {
    out.kind = CanonicalAnswer::Kind::number;
    out.numeric_value = std::move(f);
  } else if (auto q = detail::parse_slash_fraction(s)) {
    out.kind = CanonicalAnswer::Kind::number;
    out.numeric_value = std::move(q);
  }
  return out;
}

inline bool equivalent(const CanonicalAnswer& a, const CanonicalAnswer& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == CanonicalAnswer::Kind::string) return a.normalized_text == b.normalized_text;
  const Rational& x = *a.numeric_value;
  const Rational& y = *b.numeric_value;
  if (!a.from_decimal && !b.from_decimal) return x == y;
  static const Rational kTolerance(1, 1000000);
  return abs(x - y) <= kTolerance;
}

// 1 iff the candidate is equivalent to the ground truth; an absent
// candidate scores 0.
inline int verify(std::optional<std::string_view> candidate, std::string_view truth) {
  if (detail::trim(truth).empty()) throw ConfigError("verify: ground truth is empty");
  if (!candidate) return 0;
  return equivalent(normalize_answer(*candidate), normalize_answer(truth)) ? 1 : 0;
}

}  // namespace judgekit

#pragma once

// Iconclass notation parsing and hierarchy navigation.
//
//   notation := digits (letters | digits)* group*
//   group    := "(" [^()]* ")"
//
// A group whose text starts with "+" is a key, any other group is a
// qualifier. Whitespace outside groups is dropped; text inside groups is kept
// byte for byte.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iconcap/error.hpp"

namespace iconcap {

struct IconclassNotation {
  std::string raw;                      // as ingested
  std::vector<std::string> base;        // "25", "G", "4"
  std::vector<std::string> qualifiers;  // "ROSE"
  std::vector<std::string> keys;        // "1" for "(+1)"

  /// Canonical text: base, then "(q)" per qualifier, then "(+k)" per key.
  std::string normalized() const {
    std::string out;
    for (const auto& seg : base) out += seg;
    for (const auto& q : qualifiers) out += "(" + q + ")";
    for (const auto& k : keys) out += "(+" + k + ")";
    return out;
  }

  bool has_groups() const noexcept { return !qualifiers.empty() || !keys.empty(); }

  /// Structural equality; `raw` is ignored.
  friend bool operator==(const IconclassNotation& a, const IconclassNotation& b) {
    return a.base == b.base && a.qualifiers == b.qualifiers && a.keys == b.keys;
  }
};

namespace detail {

constexpr bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
constexpr bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }
constexpr bool is_upper(char c) noexcept { return c >= 'A' && c <= 'Z'; }

}  // namespace detail

inline IconclassNotation parse_notation(std::string_view raw) {
  using detail::is_digit;
  using detail::is_space;
  using detail::is_upper;

  IconclassNotation out;
  out.raw = std::string(raw);

  std::size_t i = 0;
  while (i < raw.size() && is_space(raw[i])) ++i;
  if (i == raw.size()) throw MalformedNotation(0, "empty notation");
  if (!is_digit(raw[i])) throw MalformedNotation(i, "notation must start with a digit");

  bool in_groups = false;
  int last_class = -1;  // 0 digits, 1 letters
  for (; i < raw.size(); ++i) {
    const char c = raw[i];
    if (is_space(c)) continue;
    if (c == '(') {
      in_groups = true;
      std::size_t j = i + 1;
      while (j < raw.size() && raw[j] != ')') {
        if (raw[j] == '(') throw MalformedNotation(j, "nested parenthesis");
        ++j;
      }
      if (j == raw.size()) throw MalformedNotation(i, "unbalanced parenthesis");
      std::string_view content = raw.substr(i + 1, j - i - 1);
      if (!content.empty() && content.front() == '+') {
        content.remove_prefix(1);
        if (!content.empty() && content.front() == '+')
          throw MalformedNotation(i + 2, "key may not start with '+'");
        out.keys.emplace_back(content);
      } else {
        out.qualifiers.emplace_back(content);
      }
      i = j;
      continue;
    }
    if (c == ')') throw MalformedNotation(i, "unbalanced parenthesis");
    if (in_groups) throw MalformedNotation(i, "base character after a group");
    int cls;
    if (is_digit(c)) {
      cls = 0;
    } else if (is_upper(c)) {
      cls = 1;
    } else {
      throw MalformedNotation(i, "unexpected character");
    }
    if (cls != last_class) out.base.emplace_back();
    out.base.back().push_back(c);
    last_class = cls;
  }
  return out;
}

/// One level up the hierarchy: the last key, else the last qualifier, else the
/// last base character. Absent for a single-character root.
inline std::optional<IconclassNotation> parent(const IconclassNotation& n) {
  IconclassNotation up = n;
  if (!up.keys.empty()) {
    up.keys.pop_back();
  } else if (!up.qualifiers.empty()) {
    up.qualifiers.pop_back();
  } else {
    if (up.base.empty()) return std::nullopt;
    if (up.base.size() == 1 && up.base.front().size() <= 1) return std::nullopt;
    up.base.back().pop_back();
    if (up.base.back().empty()) up.base.pop_back();
  }
  up.raw = up.normalized();
  return up;
}

}  // namespace iconcap

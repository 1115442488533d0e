#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "iconcap/notation.hpp"

namespace iconcap {

/// Lowercase tokens; none empty, none containing whitespace.
using TokenSequence = std::vector<std::string>;

constexpr bool is_punctuation(char c) noexcept {
  switch (c) {
    case '.': case ',': case ':': case ';': case '!': case '?':
    case '\'': case '"': case '(': case ')': case '-':
      return true;
    default:
      return false;
  }
}

/// ASCII-lowercases and splits on whitespace; each punctuation character
/// (.,:;!?'"()-) becomes a token of its own. Bytes >= 0x80 pass through.
inline TokenSequence tokenize(std::string_view text) {
  TokenSequence out;
  std::string cur;
  const auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char c : text) {
    if (detail::is_space(c)) {
      flush();
    } else if (is_punctuation(c)) {
      flush();
      out.emplace_back(1, c);
    } else {
      cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    }
  }
  flush();
  return out;
}

/// Removes tokens made only of punctuation characters.
inline TokenSequence strip_punctuation(TokenSequence tokens) {
  std::erase_if(tokens, [](const std::string& t) { return std::all_of(t.begin(), t.end(), is_punctuation); });
  return tokens;
}

}  // namespace iconcap

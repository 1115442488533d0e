#pragma once

#include <string>
#include <vector>

#include "iconcap/tokenize.hpp"

namespace iconcap::metrics {

/// A candidate caption and its references (at least one).
struct EvalPair {
  std::string image_id;
  TokenSequence candidate;
  std::vector<TokenSequence> references;
};

namespace detail {

/// n-gram key: tokens joined by a single space (tokens never hold whitespace).
inline std::string ngram_key(const TokenSequence& tokens, std::size_t begin, std::size_t n) {
  std::string key = tokens[begin];
  for (std::size_t i = 1; i < n; ++i) {
    key.push_back(' ');
    key += tokens[begin + i];
  }
  return key;
}

}  // namespace detail

}  // namespace iconcap::metrics

#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "iconcap/metrics/types.hpp"

namespace iconcap::metrics {

inline std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// LCS F-measure with recall weighted by beta; maximum over references.
inline double rouge_l(const EvalPair& pair, double beta = 1.2) {
  double best = 0.0;
  const double b2 = beta * beta;
  for (const auto& ref : pair.references) {
    const auto l = lcs_length(pair.candidate, ref);
    if (l == 0) continue;
    const double r = static_cast<double>(l) / static_cast<double>(ref.size());
    const double p = static_cast<double>(l) / static_cast<double>(pair.candidate.size());
    best = std::max(best, ((1.0 + b2) * r * p) / (r + b2 * p));
  }
  return std::min(best, 1.0);
}

}  // namespace iconcap::metrics

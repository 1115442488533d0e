#pragma once

// BLEU with clipped n-gram precisions and a brevity penalty.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <span>
#include <string>
#include <unordered_map>

#include "iconcap/metrics/types.hpp"

namespace iconcap::metrics {

inline constexpr std::size_t kMaxBleuOrder = 4;

/// A zero clipped count at order n gives precision epsilon / (total_n + floor)
/// instead of 0, so the geometric mean stays defined. The defaults reproduce
/// the near-zero per-caption values reported by common caption scorers.
struct BleuSmoothing {
  double epsilon = 1e-15;
  double floor = 1e-9;
};

/// Sufficient statistics; additive across pairs for corpus-level BLEU.
struct BleuStats {
  std::array<std::size_t, kMaxBleuOrder> clipped{};
  std::array<std::size_t, kMaxBleuOrder> total{};
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;

  BleuStats& operator+=(const BleuStats& o) {
    for (std::size_t n = 0; n < kMaxBleuOrder; ++n) {
      clipped[n] += o.clipped[n];
      total[n] += o.total[n];
    }
    candidate_length += o.candidate_length;
    reference_length += o.reference_length;
    return *this;
  }
};

namespace detail {

inline std::unordered_map<std::string, std::size_t> count_ngrams(const TokenSequence& tokens, std::size_t n) {
  std::unordered_map<std::string, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) ++counts[ngram_key(tokens, i, n)];
  return counts;
}

}  // namespace detail

/// Reference length closest to the candidate length; ties go to the shorter.
inline std::size_t closest_reference_length(const EvalPair& pair) {
  const auto c = static_cast<long long>(pair.candidate.size());
  std::size_t best = 0;
  long long best_diff = -1;
  for (const auto& ref : pair.references) {
    const auto l = static_cast<long long>(ref.size());
    const auto d = std::llabs(l - c);
    if (best_diff < 0 || d < best_diff || (d == best_diff && ref.size() < best)) {
      best = ref.size();
      best_diff = d;
    }
  }
  return best;
}

inline BleuStats bleu_stats(const EvalPair& pair) {
  BleuStats s;
  s.candidate_length = pair.candidate.size();
  s.reference_length = closest_reference_length(pair);
  for (std::size_t n = 1; n <= kMaxBleuOrder; ++n) {
    const auto cand = detail::count_ngrams(pair.candidate, n);
    std::unordered_map<std::string, std::size_t> max_ref;
    for (const auto& ref : pair.references)
      for (const auto& [g, c] : detail::count_ngrams(ref, n)) {
        auto& m = max_ref[g];
        if (c > m) m = c;
      }
    std::size_t clipped = 0;
    for (const auto& [g, c] : cand) {
      auto it = max_ref.find(g);
      if (it != max_ref.end()) clipped += std::min(c, it->second);
    }
    s.clipped[n - 1] = clipped;
    s.total[n - 1] = pair.candidate.size() >= n ? pair.candidate.size() - n + 1 : 0;
  }
  return s;
}

/// min(1, exp(1 - r/c)); 0 for an empty candidate.
inline double brevity_penalty(std::size_t candidate_length, std::size_t reference_length) {
  if (candidate_length == 0) return 0.0;
  if (candidate_length >= reference_length) return 1.0;
  return std::exp(1.0 - static_cast<double>(reference_length) / static_cast<double>(candidate_length));
}

/// Cumulative BLEU-max_n: geometric mean of p_1..p_max_n times the brevity
/// penalty.
inline double bleu_from_stats(const BleuStats& s, std::size_t max_n, const BleuSmoothing& smoothing = {}) {
  if (s.candidate_length == 0) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 0; n < max_n; ++n) {
    const double p = s.clipped[n] > 0
                         ? static_cast<double>(s.clipped[n]) / static_cast<double>(s.total[n])
                         : smoothing.epsilon / (static_cast<double>(s.total[n]) + smoothing.floor);
    if (p <= 0.0) return 0.0;
    log_sum += std::log(p);
  }
  const double score = std::exp(log_sum / static_cast<double>(max_n)) *
                       brevity_penalty(s.candidate_length, s.reference_length);
  return std::min(1.0, score);
}

inline double bleu(const EvalPair& pair, std::size_t max_n, const BleuSmoothing& smoothing = {}) {
  return bleu_from_stats(bleu_stats(pair), max_n, smoothing);
}

/// Corpus BLEU: clipped counts, totals and lengths are summed before the
/// precisions are formed.
inline double corpus_bleu(std::span<const EvalPair> pairs, std::size_t max_n, const BleuSmoothing& smoothing = {}) {
  BleuStats total;
  for (const auto& p : pairs) total += bleu_stats(p);
  return bleu_from_stats(total, max_n, smoothing);
}

}  // namespace iconcap::metrics

#pragma once

// Unigram-alignment METEOR: exact matches, then Porter-stem matches, then an
// optional synonym table.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "iconcap/metrics/types.hpp"
#include "iconcap/porter_stemmer.hpp"

namespace iconcap::metrics {

struct MeteorParams {
  double alpha = 0.9;
  double gamma = 0.5;
  double theta = 3.0;
};

/// Symmetric word-level synonym groups. No resource ships with the library;
/// callers fill it from their own lexicon.
class SynonymTable {
public:
  void add_group(const std::vector<std::string>& words) {
    const auto id = next_group_++;
    for (const auto& w : words) groups_[w].insert(id);
  }

  bool match(const std::string& a, const std::string& b) const {
    auto ia = groups_.find(a);
    auto ib = groups_.find(b);
    if (ia == groups_.end() || ib == groups_.end()) return false;
    return std::any_of(ia->second.begin(), ia->second.end(),
                       [&](std::size_t g) { return ib->second.count(g) > 0; });
  }

  bool empty() const noexcept { return groups_.empty(); }

private:
  std::map<std::string, std::set<std::size_t>> groups_;
  std::size_t next_group_ = 0;
};

/// alignment[i] is the reference index matched to candidate token i, or -1.
struct MeteorAlignment {
  std::vector<long> alignment;
  std::size_t matches = 0;
  std::size_t chunks = 0;
};

namespace detail {

// eq(i, j): candidate token i may align to reference token j.
template <class Eq>
void align_stage(std::vector<long>& align, std::vector<bool>& ref_used, Eq&& eq) {
  const std::size_t ref_size = ref_used.size();
  for (std::size_t i = 0; i < align.size(); ++i) {
    if (align[i] >= 0) continue;
    long pick = -1;
    // Continue the previous candidate token's chunk when possible.
    if (i > 0 && align[i - 1] >= 0) {
      const auto next = static_cast<std::size_t>(align[i - 1]) + 1;
      if (next < ref_size && !ref_used[next] && eq(i, next)) pick = static_cast<long>(next);
    }
    for (std::size_t j = 0; pick < 0 && j < ref_size; ++j)
      if (!ref_used[j] && eq(i, j)) pick = static_cast<long>(j);
    if (pick >= 0) {
      align[i] = pick;
      ref_used[static_cast<std::size_t>(pick)] = true;
    }
  }
}

}  // namespace detail

inline MeteorAlignment meteor_align(const TokenSequence& cand, const TokenSequence& ref,
                                    const SynonymTable* synonyms = nullptr) {
  MeteorAlignment out;
  out.alignment.assign(cand.size(), -1);
  std::vector<bool> ref_used(ref.size(), false);

  detail::align_stage(out.alignment, ref_used, [&](std::size_t i, std::size_t j) { return cand[i] == ref[j]; });

  std::vector<std::string> cand_stems, ref_stems;
  cand_stems.reserve(cand.size());
  ref_stems.reserve(ref.size());
  for (const auto& t : cand) cand_stems.push_back(porter_stem(t));
  for (const auto& t : ref) ref_stems.push_back(porter_stem(t));
  detail::align_stage(out.alignment, ref_used,
                      [&](std::size_t i, std::size_t j) { return cand_stems[i] == ref_stems[j]; });

  if (synonyms && !synonyms->empty())
    detail::align_stage(out.alignment, ref_used,
                        [&](std::size_t i, std::size_t j) { return synonyms->match(cand[i], ref[j]); });

  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (out.alignment[i] < 0) continue;
    ++out.matches;
    if (i == 0 || out.alignment[i - 1] < 0 || out.alignment[i] != out.alignment[i - 1] + 1) ++out.chunks;
  }
  return out;
}

/// F = P*R / (alpha*P + (1-alpha)*R), scaled by 1 - gamma*(chunks/m)^theta.
/// Maximum over references; 0 when nothing aligns.
inline double meteor(const EvalPair& pair, const MeteorParams& params = {}, const SynonymTable* synonyms = nullptr) {
  double best = 0.0;
  for (const auto& ref : pair.references) {
    const auto a = meteor_align(pair.candidate, ref, synonyms);
    if (a.matches == 0) continue;
    const double m = static_cast<double>(a.matches);
    const double p = m / static_cast<double>(pair.candidate.size());
    const double r = m / static_cast<double>(ref.size());
    const double f = p * r / (params.alpha * p + (1.0 - params.alpha) * r);
    const double penalty = params.gamma * std::pow(static_cast<double>(a.chunks) / m, params.theta);
    best = std::max(best, f * (1.0 - penalty));
  }
  return std::clamp(best, 0.0, 1.0);
}

}  // namespace iconcap::metrics

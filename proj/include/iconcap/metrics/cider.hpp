#pragma once

// CIDEr: per n-gram order, cosine similarity of TF-IDF vectors of the
// candidate and each reference. TF is the raw n-gram count and
// IDF(g) = log(|I| / max(1, df(g))), df counting images whose reference set
// contains g. The per-image score is 10 x the mean over orders, averaged over
// references.
//
// An order at which both vectors are zero carries no evidence and is left out
// of the mean. If every order is left out the score is 10 for identical token
// sequences and 0 otherwise.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "iconcap/error.hpp"
#include "iconcap/metrics/types.hpp"
#include "iconcap/parallel.hpp"

namespace iconcap::metrics {

inline constexpr std::size_t kCiderOrder = 4;

/// Per order n (index n-1): n-gram -> TF-IDF weight.
using NGramVector = std::array<std::unordered_map<std::string, double>, kCiderOrder>;

class CiderModel {
public:
  /// Document frequencies come from the references of `corpus`. Throws
  /// EmptyCorpus.
  explicit CiderModel(std::span<const EvalPair> corpus) : images_(corpus.size()) {
    if (corpus.empty()) throw EmptyCorpus();
    for (const auto& pair : corpus) {
      std::unordered_set<std::string> seen;
      for (const auto& ref : pair.references)
        for (std::size_t n = 1; n <= kCiderOrder; ++n)
          for (std::size_t i = 0; i + n <= ref.size(); ++i) seen.insert(detail::ngram_key(ref, i, n));
      for (const auto& g : seen) ++df_[g];
    }
  }

  double idf(const std::string& ngram) const {
    auto it = df_.find(ngram);
    const std::size_t df = it == df_.end() ? 1 : std::max<std::size_t>(1, it->second);
    // log(N/N) is exactly 0, so ubiquitous n-grams carry no weight.
    return std::log(static_cast<double>(images_) / static_cast<double>(df));
  }

  std::size_t images() const noexcept { return images_; }

  NGramVector vectorize(const TokenSequence& tokens) const {
    NGramVector vec;
    for (std::size_t n = 1; n <= kCiderOrder; ++n) {
      auto& m = vec[n - 1];
      for (std::size_t i = 0; i + n <= tokens.size(); ++i) m[detail::ngram_key(tokens, i, n)] += 1.0;
      for (auto& [g, w] : m) w *= idf(g);
    }
    return vec;
  }

  double score(const TokenSequence& candidate, const std::vector<TokenSequence>& references) const {
    if (references.empty()) return 0.0;
    const auto cvec = vectorize(candidate);
    double sum = 0.0;
    for (const auto& ref : references) sum += score_against(cvec, candidate, vectorize(ref), ref);
    return std::clamp(sum / static_cast<double>(references.size()), 0.0, 10.0);
  }

private:
  static double norm(const std::unordered_map<std::string, double>& v) {
    double s = 0.0;
    for (const auto& [g, w] : v) s += w * w;
    return std::sqrt(s);
  }

  static double score_against(const NGramVector& cvec, const TokenSequence& cand, const NGramVector& rvec,
                              const TokenSequence& ref) {
    double total = 0.0;
    std::size_t orders = 0;
    for (std::size_t n = 0; n < kCiderOrder; ++n) {
      const double nc = norm(cvec[n]);
      const double nr = norm(rvec[n]);
      if (nc == 0.0 && nr == 0.0) continue;
      ++orders;
      if (nc == 0.0 || nr == 0.0) continue;
      double dot = 0.0;
      for (const auto& [g, w] : cvec[n]) {
        auto it = rvec[n].find(g);
        if (it != rvec[n].end()) dot += w * it->second;
      }
      total += std::min(1.0, dot / (nc * nr));
    }
    if (orders == 0) return cand == ref ? 10.0 : 0.0;
    return 10.0 * total / static_cast<double>(orders);
  }

  std::size_t images_;
  std::unordered_map<std::string, std::size_t> df_;
};

struct CiderResult {
  std::vector<double> scores;  // corpus order
  double corpus = 0.0;         // mean of scores
};

inline CiderResult cider(std::span<const EvalPair> corpus, unsigned jobs = 1) {
  const CiderModel model(corpus);
  CiderResult out;
  out.scores.resize(corpus.size());
  parallel_for(corpus.size(), jobs,
               [&](std::size_t i) { out.scores[i] = model.score(corpus[i].candidate, corpus[i].references); });
  double sum = 0.0;
  for (double s : out.scores) sum += s;
  out.corpus = sum / static_cast<double>(corpus.size());
  return out;
}

}  // namespace iconcap::metrics

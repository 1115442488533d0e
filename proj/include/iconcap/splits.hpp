#pragma once

// Deterministic train/val/test assignment.
//
// Records are sorted by image_id (bytewise), then permuted with a Fisher-Yates
// shuffle driven by std::mt19937_64 seeded with `seed`: for i from n-1 down to
// 1, j is drawn uniformly from [0, i] by rejection sampling on the raw 64-bit
// output and positions i and j are swapped. The first n_test permuted records
// go to test, the next n_val to val, the rest to train. Both the engine and
// the draw are fully specified, so the assignment is portable.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "iconcap/caption.hpp"
#include "iconcap/error.hpp"
#include "iconcap/jsonl.hpp"

namespace iconcap {

struct SplitConfig {
  std::uint64_t seed = 0;
  std::size_t n_val = 5000;
  std::size_t n_test = 5000;
};

/// Uniform draw from [0, range) without modulo bias.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t range) {
  const std::uint64_t threshold = (0 - range) % range;  // 2^64 mod range
  std::uint64_t x;
  do {
    x = gen();
  } while (x < threshold);
  return x % range;
}

inline std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 gen(seed);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(gen, i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

/// Returns the records sorted by image_id with `split` set. Throws
/// InsufficientRecords when n_val + n_test exceeds the record count and
/// DuplicateId on repeated ids.
inline std::vector<CaptionRecord> assign_splits(std::vector<CaptionRecord> records, const SplitConfig& cfg) {
  if (cfg.n_val + cfg.n_test > records.size())
    throw InsufficientRecords(records.size(), cfg.n_val + cfg.n_test);
  std::sort(records.begin(), records.end(),
            [](const CaptionRecord& a, const CaptionRecord& b) { return a.image_id < b.image_id; });
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].image_id == records[i - 1].image_id) throw DuplicateId(records[i].image_id);

  const auto perm = seeded_permutation(records.size(), cfg.seed);
  for (std::size_t k = 0; k < perm.size(); ++k) {
    auto& rec = records[perm[k]];
    if (k < cfg.n_test) {
      rec.split = Split::test;
    } else if (k < cfg.n_test + cfg.n_val) {
      rec.split = Split::val;
    } else {
      rec.split = Split::train;
    }
  }
  return records;
}

/// Writes {"image_id", "caption"} lines sorted by image_id; with a filter only
/// that split is written. Returns the number of lines.
inline std::size_t export_jsonl(const std::vector<CaptionRecord>& records, const std::string& path,
                                std::optional<Split> split_filter = std::nullopt) {
  std::vector<const CaptionRecord*> rows;
  for (const auto& r : records)
    if (!split_filter || r.split == *split_filter) rows.push_back(&r);
  std::sort(rows.begin(), rows.end(),
            [](const CaptionRecord* a, const CaptionRecord* b) { return a->image_id < b->image_id; });
  auto out = detail::open_out(path);
  for (const auto* r : rows) write_caption(out, {r->image_id, r->clean_description});
  if (!out) throw IoFailure(path, "write failed");
  return rows.size();
}

}  // namespace iconcap

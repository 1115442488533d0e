#pragma once

// Caption construction: code lists -> raw concatenated correlates -> cleaned
// descriptions.

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "iconcap/annotations.hpp"
#include "iconcap/correlates.hpp"
#include "iconcap/error.hpp"
#include "iconcap/notation.hpp"
#include "iconcap/parallel.hpp"

namespace iconcap {

using detail::is_upper;

enum class Split { unassigned, train, val, test };

inline std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
    case Split::unassigned: break;
  }
  return "unassigned";
}

inline Split split_from_string(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  if (s == "unassigned" || s.empty()) return Split::unassigned;
  throw SchemaViolation(std::string(s), "unknown split name");
}

struct CaptionRecord {
  std::string image_id;
  std::string raw_description;
  std::string clean_description;
  Split split = Split::unassigned;

  friend bool operator==(const CaptionRecord&, const CaptionRecord&) = default;
};

struct CleaningConfig {
  std::vector<std::string> uppercase_stoplist{"BB"};
  bool drop_etc = true;
  bool dedup = true;
};

/// Stoplist entries must be 1-4 uppercase ASCII letters.
inline void validate(const CleaningConfig& cfg) {
  for (const auto& token : cfg.uppercase_stoplist) {
    const bool ok = !token.empty() && token.size() <= 4 &&
                    std::all_of(token.begin(), token.end(), [](char c) { return is_upper(c); });
    if (!ok) throw std::invalid_argument("stoplist entry \"" + token + "\" is not 1-4 uppercase letters");
  }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::string strip_groups(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  int depth = 0;
  for (char c : s) {
    if (c == '(') {
      ++depth;
    } else if (c == ')') {
      if (depth > 0) --depth;
    } else if (depth == 0) {
      out.push_back(c);
    }
  }
  return out;
}

// Replaces every `<ws>- X -<ws>` run (X a stoplist token, whitespace on both
// sides of X) together with its surrounding whitespace by `sep`.
inline std::string strip_stoplist(std::string s, const std::vector<std::string>& stoplist,
                                  std::string_view sep) {
  std::size_t from = 0;
  while (from < s.size()) {
    std::size_t best_begin = std::string::npos, best_end = 0;
    for (std::size_t p = s.find('-', from); p != std::string::npos; p = s.find('-', p + 1)) {
      if (p > 0 && !is_space(s[p - 1])) continue;
      std::size_t q = p + 1;
      while (q < s.size() && is_space(s[q])) ++q;
      if (q == p + 1) continue;
      for (const auto& token : stoplist) {
        if (token.empty() || s.compare(q, token.size(), token) != 0) continue;
        std::size_t r = q + token.size();
        std::size_t t = r;
        while (t < s.size() && is_space(s[t])) ++t;
        if (t == r || t >= s.size() || s[t] != '-') continue;
        if (t + 1 < s.size() && !is_space(s[t + 1])) continue;
        std::size_t begin = p;
        while (begin > 0 && is_space(s[begin - 1])) --begin;
        std::size_t end = t + 1;
        while (end < s.size() && is_space(s[end])) ++end;
        best_begin = begin;
        best_end = end;
        break;
      }
      if (best_begin != std::string::npos) break;
    }
    if (best_begin == std::string::npos) break;
    s.replace(best_begin, best_end - best_begin, sep);
    from = best_begin + sep.size();
  }
  return s;
}

inline std::string erase_all(std::string s, std::string_view needle) {
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p)) s.erase(p, needle.size());
  return s;
}

inline std::string collapse_spaces(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == ' ' && !out.empty() && out.back() == ' ') continue;
    out.push_back(c);
  }
  return out;
}

inline std::string dedup_segments(std::string_view s) {
  std::vector<std::string_view> kept;
  std::string out;
  std::size_t start = 0;
  bool first = true;
  while (true) {
    const auto comma = s.find(',', start);
    const auto seg = s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    const auto key = trim(seg);
    if (std::find(kept.begin(), kept.end(), key) == kept.end()) {
      kept.push_back(key);
      if (!first) out.push_back(',');
      out.append(seg);
      first = false;
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string finish(std::string_view s) {
  const auto sep = [](char c) { return is_space(c) || c == ','; };
  while (!s.empty() && sep(s.front())) s.remove_prefix(1);
  while (!s.empty() && sep(s.back())) s.remove_suffix(1);
  std::string out(s);
  if (!out.empty() && out.back() != '.') out.push_back('.');
  return out;
}

}  // namespace detail

/// Cleans a raw concatenated description. One pass removes bracketed groups,
/// then " - X - " runs of stoplist codes, then ", etc.", collapses spaces,
/// drops repeated comma segments and finally trims and terminates with ".".
/// Passes repeat until the text is stable, which makes the result idempotent.
inline std::string clean_description(std::string_view raw, const CleaningConfig& cfg = {}) {
  const std::string_view sep = raw.find(',') != std::string_view::npos ? ", " : " ";
  std::string cur(raw);
  while (true) {
    std::string next = detail::strip_groups(cur);
    next = detail::strip_stoplist(std::move(next), cfg.uppercase_stoplist, sep);
    if (cfg.drop_etc) next = detail::erase_all(std::move(next), ", etc.");
    next = detail::collapse_spaces(next);
    if (cfg.dedup) next = detail::dedup_segments(next);
    next = detail::finish(next);
    if (next == cur) return next;
    cur = std::move(next);
  }
}

struct ResolvedCodes {
  std::vector<std::string> correlates;
  std::size_t unresolved = 0;
};

/// Looks up each code; unparseable or unknown codes are counted, not fatal.
inline ResolvedCodes resolve_codes(const AnnotationRecord& record, const CorrelateStore& store,
                                   bool fallback = false) {
  ResolvedCodes out;
  for (const auto& code : record.codes) {
    std::optional<std::string> text;
    try {
      text = correlate(parse_notation(code), store, fallback);
    } catch (const MalformedNotation&) {
    }
    if (text) {
      out.correlates.push_back(std::move(*text));
    } else {
      ++out.unresolved;
    }
  }
  return out;
}

inline std::string join_correlates(const std::vector<std::string>& correlates) {
  std::string out;
  for (std::size_t i = 0; i < correlates.size(); ++i) {
    if (i) out += ", ";
    out += correlates[i];
  }
  return out;
}

/// Correlates joined in code order with ", ". Throws NoResolvableCodes.
inline std::string build_raw(const AnnotationRecord& record, const CorrelateStore& store,
                             bool fallback = false) {
  auto resolved = resolve_codes(record, store, fallback);
  if (resolved.correlates.empty()) throw NoResolvableCodes(record.image_id);
  return join_correlates(resolved.correlates);
}

struct BuildOptions {
  CleaningConfig cleaning;
  bool fallback = false;
  unsigned jobs = 1;
};

struct BuildReport {
  std::size_t input = 0;
  std::size_t kept = 0;
  std::size_t dropped_empty = 0;
  std::size_t unresolved_codes = 0;
};

struct DatasetBuild {
  std::vector<CaptionRecord> records;  // annotation order, splits unassigned
  BuildReport report;
};

/// Records whose codes all miss the store, or whose cleaned text is empty,
/// are dropped and counted in `dropped_empty`.
inline DatasetBuild build_dataset(const std::vector<AnnotationRecord>& annotations,
                                  const CorrelateStore& store, const BuildOptions& opts = {}) {
  struct Slot {
    CaptionRecord record;
    std::size_t unresolved = 0;
  };
  std::vector<Slot> slots(annotations.size());
  parallel_for(annotations.size(), opts.jobs, [&](std::size_t i) {
    const auto& ann = annotations[i];
    auto resolved = resolve_codes(ann, store, opts.fallback);
    auto& slot = slots[i];
    slot.unresolved = resolved.unresolved;
    slot.record.image_id = ann.image_id;
    slot.record.raw_description = join_correlates(resolved.correlates);
    if (!resolved.correlates.empty())
      slot.record.clean_description = clean_description(slot.record.raw_description, opts.cleaning);
  });

  DatasetBuild out;
  out.report.input = annotations.size();
  for (auto& slot : slots) {
    out.report.unresolved_codes += slot.unresolved;
    if (slot.record.clean_description.empty()) {
      ++out.report.dropped_empty;
    } else {
      out.records.push_back(std::move(slot.record));
    }
  }
  out.report.kept = out.records.size();
  return out;
}

}  // namespace iconcap

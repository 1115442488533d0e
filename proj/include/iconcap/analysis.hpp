#pragma once

// Post-hoc caption analysis: phrase x genre distributions, caption length
// statistics and the most-frequent-caption baseline.

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "iconcap/caption.hpp"
#include "iconcap/error.hpp"
#include "iconcap/jsonl.hpp"
#include "iconcap/metrics/evaluate.hpp"
#include "iconcap/tokenize.hpp"

namespace iconcap {

struct GenreRecord {
  std::string image_id;
  std::string genre;
  std::string caption;
};

enum class PhraseUnit { whole_caption, segment };

inline constexpr std::size_t kUnboundedTopK = std::numeric_limits<std::size_t>::max();

struct GenreDistribution {
  std::vector<std::string> genres;   // sorted
  std::vector<std::string> phrases;  // by global count desc, then lexicographic
  std::vector<std::vector<std::size_t>> counts;  // [phrase][genre]
};

/// Caption units: the trimmed caption, or its comma-separated segments with
/// a terminal period removed. Empty units are skipped.
inline std::vector<std::string> caption_units(std::string_view caption, PhraseUnit unit) {
  std::vector<std::string> out;
  if (unit == PhraseUnit::whole_caption) {
    auto t = detail::trim(caption);
    if (!t.empty()) out.emplace_back(t);
    return out;
  }
  std::size_t start = 0;
  while (start <= caption.size()) {
    const auto comma = caption.find(',', start);
    auto seg = detail::trim(caption.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                   : comma - start));
    if (!seg.empty() && seg.back() == '.') seg = detail::trim(seg.substr(0, seg.size() - 1));
    if (!seg.empty()) out.emplace_back(seg);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Keeps the k most frequent units (ties lexicographic) and counts their
/// occurrences per genre. Throws EmptyInput on no records.
inline GenreDistribution genre_distribution(const std::vector<GenreRecord>& records, std::size_t k,
                                            PhraseUnit unit = PhraseUnit::segment) {
  if (records.empty()) throw EmptyInput("no genre records");
  if (k == 0) throw std::invalid_argument("k must be at least 1");

  std::map<std::string, std::map<std::string, std::size_t>> by_phrase;
  std::map<std::string, std::size_t> totals;
  std::map<std::string, std::size_t> genre_index;
  for (const auto& r : records) {
    if (r.genre.empty()) throw SchemaViolation(r.image_id, "empty genre");
    genre_index.emplace(r.genre, 0);
    for (auto& u : caption_units(r.caption, unit)) {
      ++by_phrase[u][r.genre];
      ++totals[u];
    }
  }

  GenreDistribution out;
  for (auto& [g, idx] : genre_index) {
    idx = out.genres.size();
    out.genres.push_back(g);
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(totals.begin(), totals.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > k) ranked.resize(k);

  for (const auto& [phrase, total] : ranked) {
    std::vector<std::size_t> row(out.genres.size(), 0);
    for (const auto& [g, c] : by_phrase[phrase]) row[genre_index[g]] = c;
    out.phrases.push_back(phrase);
    out.counts.push_back(std::move(row));
  }
  return out;
}

/// Header `phrase,<genre>...`, then one row per phrase.
inline void write_csv(std::ostream& out, const GenreDistribution& dist) {
  out << "phrase";
  for (const auto& g : dist.genres) out << ',' << metrics::detail::csv_field(g);
  out << '\n';
  for (std::size_t i = 0; i < dist.phrases.size(); ++i) {
    out << metrics::detail::csv_field(dist.phrases[i]);
    for (auto c : dist.counts[i]) out << ',' << c;
    out << '\n';
  }
}

namespace detail {

// Minimal RFC 4180 field splitter for one line.
inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back().push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back().push_back(c);
    }
  }
  return fields;
}

}  // namespace detail

/// `image_id,genre` rows; a leading `image_id,genre` header is skipped.
inline std::vector<std::pair<std::string, std::string>> read_genre_csv(std::istream& in,
                                                                       const std::string& source = "<csv>") {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    auto f = detail::split_csv_line(line);
    if (f.size() != 2) throw SchemaViolation(source + ":" + std::to_string(lineno), "expected image_id,genre");
    if (lineno == 1 && f[0] == "image_id" && f[1] == "genre") continue;
    out.emplace_back(std::move(f[0]), std::move(f[1]));
  }
  return out;
}

/// Inner join of genre rows with captions on image_id.
inline std::vector<GenreRecord> join_genres(const std::vector<std::pair<std::string, std::string>>& genres,
                                            const std::vector<CaptionLine>& captions) {
  std::map<std::string, const std::string*> by_id;
  for (const auto& c : captions) by_id.emplace(c.image_id, &c.caption);
  std::vector<GenreRecord> out;
  for (const auto& [id, genre] : genres) {
    auto it = by_id.find(id);
    if (it != by_id.end()) out.push_back({id, genre, *it->second});
  }
  return out;
}

struct LengthStats {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  std::size_t min = 0;
  std::size_t max = 0;
  std::vector<std::size_t> histogram;  // bucket b counts lengths in [5b, 5b+4]
};

inline constexpr std::size_t kHistogramBucket = 5;

/// Token lengths (punctuation tokens excluded). An empty input gives an
/// all-zero report.
inline LengthStats length_stats(const std::vector<std::string>& captions) {
  LengthStats s;
  if (captions.empty()) return s;
  std::vector<std::size_t> lengths;
  lengths.reserve(captions.size());
  for (const auto& c : captions) lengths.push_back(strip_punctuation(tokenize(c)).size());
  std::sort(lengths.begin(), lengths.end());
  s.count = lengths.size();
  s.min = lengths.front();
  s.max = lengths.back();
  double sum = 0.0;
  for (auto l : lengths) sum += static_cast<double>(l);
  s.mean = sum / static_cast<double>(s.count);
  const auto mid = s.count / 2;
  s.median = s.count % 2 ? static_cast<double>(lengths[mid])
                         : (static_cast<double>(lengths[mid - 1]) + static_cast<double>(lengths[mid])) / 2.0;
  s.histogram.assign(s.max / kHistogramBucket + 1, 0);
  for (auto l : lengths) ++s.histogram[l / kHistogramBucket];
  return s;
}

/// Every test id gets the most frequent training caption (ties
/// lexicographic). Throws EmptyInput on an empty training set.
inline std::vector<CaptionLine> frequency_baseline(const std::vector<std::string>& train_captions,
                                                   const std::vector<std::string>& test_ids) {
  if (train_captions.empty()) throw EmptyInput("no training captions");
  std::map<std::string, std::size_t> freq;
  for (const auto& c : train_captions) ++freq[c];
  const auto* mode = &*freq.begin();
  for (const auto& entry : freq)
    if (entry.second > mode->second) mode = &entry;
  std::vector<CaptionLine> out;
  out.reserve(test_ids.size());
  for (const auto& id : test_ids) out.push_back({id, mode->first});
  return out;
}

}  // namespace iconcap

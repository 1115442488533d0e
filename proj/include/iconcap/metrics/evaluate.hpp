#pragma once

// Full evaluation: candidate and reference caption files -> MetricReport with
// per-example rows and a corpus row.

#include <algorithm>
#include <array>
#include <charconv>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iconcap/error.hpp"
#include "iconcap/jsonl.hpp"
#include "iconcap/metrics/bleu.hpp"
#include "iconcap/metrics/cider.hpp"
#include "iconcap/metrics/meteor.hpp"
#include "iconcap/metrics/rouge.hpp"
#include "iconcap/parallel.hpp"
#include "iconcap/tokenize.hpp"

namespace iconcap::metrics {

struct EvalConfig {
  BleuSmoothing bleu_smoothing;
  double rouge_beta = 1.2;
  MeteorParams meteor;
  const SynonymTable* synonyms = nullptr;
  bool keep_punctuation = false;  // punctuation tokens are dropped before scoring by default
  unsigned jobs = 1;
};

/// Natural scale: BLEU, METEOR, ROUGE-L in [0,1]; CIDEr in [0,10].
struct Scores {
  std::array<double, kMaxBleuOrder> bleu{};
  double meteor = 0.0;
  double rouge_l = 0.0;
  double cider = 0.0;
};

struct ExampleScores {
  std::string image_id;
  Scores scores;
};

struct MetricReport {
  std::vector<ExampleScores> examples;  // sorted by image_id
  Scores corpus;
};

inline constexpr std::array<const char*, 7> kScoreNames{"bleu1", "bleu2", "bleu3", "bleu4",
                                                         "meteor", "rouge_l", "cider"};

inline std::array<double, 7> flatten(const Scores& s) {
  return {s.bleu[0], s.bleu[1], s.bleu[2], s.bleu[3], s.meteor, s.rouge_l, s.cider};
}

inline TokenSequence scoring_tokens(std::string_view caption, const EvalConfig& cfg) {
  auto tokens = tokenize(caption);
  return cfg.keep_punctuation ? tokens : strip_punctuation(std::move(tokens));
}

/// Pairs every candidate with the references sharing its image_id. Repeated
/// reference ids become multiple references; a repeated candidate id throws
/// DuplicateId, a candidate without references throws MissingReference.
inline std::vector<EvalPair> make_pairs(const std::vector<CaptionLine>& candidates,
                                        const std::vector<CaptionLine>& references, const EvalConfig& cfg = {}) {
  std::map<std::string, std::vector<TokenSequence>> refs;
  for (const auto& r : references) refs[r.image_id].push_back(scoring_tokens(r.caption, cfg));

  std::set<std::string> seen;
  std::vector<EvalPair> pairs;
  pairs.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (!seen.insert(c.image_id).second) throw DuplicateId(c.image_id);
    auto it = refs.find(c.image_id);
    if (it == refs.end()) throw MissingReference(c.image_id);
    pairs.push_back({c.image_id, scoring_tokens(c.caption, cfg), it->second});
  }
  std::sort(pairs.begin(), pairs.end(), [](const EvalPair& a, const EvalPair& b) { return a.image_id < b.image_id; });
  return pairs;
}

inline MetricReport evaluate_pairs(const std::vector<EvalPair>& pairs, const EvalConfig& cfg = {}) {
  if (pairs.empty()) throw EmptyCorpus();
  const CiderModel cider_model(pairs);

  MetricReport report;
  report.examples.resize(pairs.size());
  parallel_for(pairs.size(), cfg.jobs, [&](std::size_t i) {
    const auto& pair = pairs[i];
    auto& row = report.examples[i];
    row.image_id = pair.image_id;
    const auto stats = bleu_stats(pair);
    for (std::size_t n = 1; n <= kMaxBleuOrder; ++n)
      row.scores.bleu[n - 1] = bleu_from_stats(stats, n, cfg.bleu_smoothing);
    row.scores.meteor = meteor(pair, cfg.meteor, cfg.synonyms);
    row.scores.rouge_l = rouge_l(pair, cfg.rouge_beta);
    row.scores.cider = cider_model.score(pair.candidate, pair.references);
  });

  BleuStats total;
  for (const auto& p : pairs) total += bleu_stats(p);
  for (std::size_t n = 1; n <= kMaxBleuOrder; ++n)
    report.corpus.bleu[n - 1] = bleu_from_stats(total, n, cfg.bleu_smoothing);
  for (const auto& row : report.examples) {
    report.corpus.meteor += row.scores.meteor;
    report.corpus.rouge_l += row.scores.rouge_l;
    report.corpus.cider += row.scores.cider;
  }
  const auto count = static_cast<double>(pairs.size());
  report.corpus.meteor /= count;
  report.corpus.rouge_l /= count;
  report.corpus.cider /= count;
  return report;
}

inline MetricReport evaluate(const std::vector<CaptionLine>& candidates, const std::vector<CaptionLine>& references,
                             const EvalConfig& cfg = {}) {
  return evaluate_pairs(make_pairs(candidates, references, cfg), cfg);
}

inline MetricReport evaluate_files(const std::string& candidates_path, const std::string& references_path,
                                   const EvalConfig& cfg = {}) {
  return evaluate(read_captions_file(candidates_path), read_captions_file(references_path), cfg);
}

/// True when every score lies in its natural range.
inline bool in_range(const Scores& s) {
  const auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  return std::all_of(s.bleu.begin(), s.bleu.end(), unit) && unit(s.meteor) && unit(s.rouge_l) && s.cider >= 0.0 &&
         s.cider <= 10.0;
}

// Serialization. `x100` multiplies every score by 100 for presentation.

inline nlohmann::ordered_json to_json(const Scores& s, bool x100) {
  nlohmann::ordered_json obj;
  const auto v = flatten(s);
  for (std::size_t i = 0; i < v.size(); ++i) obj[kScoreNames[i]] = x100 ? v[i] * 100.0 : v[i];
  return obj;
}

inline nlohmann::ordered_json to_json(const MetricReport& report, bool x100 = false) {
  nlohmann::ordered_json out;
  out["corpus"] = to_json(report.corpus, x100);
  auto& rows = out["examples"] = nlohmann::ordered_json::array();
  for (const auto& e : report.examples) {
    nlohmann::ordered_json row;
    row["image_id"] = e.image_id;
    const auto scores = to_json(e.scores, x100);
    for (auto& [k, v] : scores.items()) row[k] = v;
    rows.push_back(std::move(row));
  }
  return out;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

/// One row per example, header `image_id,bleu1,...,cider`.
inline void write_csv(std::ostream& out, const MetricReport& report, bool x100 = false) {
  out << "image_id";
  for (const auto* name : kScoreNames) out << ',' << name;
  out << '\n';
  for (const auto& e : report.examples) {
    out << detail::csv_field(e.image_id);
    for (double v : flatten(e.scores)) out << ',' << detail::format_double(x100 ? v * 100.0 : v);
    out << '\n';
  }
}

}  // namespace iconcap::metrics

// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "iconcap/iconcap.hpp"
#include "test_util.hpp"

using namespace iconcap;
using namespace iconcap::metrics;

namespace {

// Tolerances.
constexpr double kRougeRow4 = 0.184, kRougeRow4Tol = 0.01;
constexpr double kMeteorRow4 = 0.0552, kMeteorRow4Tol = 0.005;
constexpr double kBleu1Row4 = 0.00055, kBleu1Factor = 2.0;
constexpr double kPropertyTol = 1e-9;
constexpr double kEndToEndSeconds = 10.0;
constexpr std::size_t kFuzzCases = 1'000'000;
constexpr std::size_t kPropertyCorpora = 1000;

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      if (!ok) detail << "; ";
      ok = false;
      detail << what;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string normalize_terminal(std::string s) {
  if (!s.empty() && s.back() == '.') {
    s.pop_back();
    while (!s.empty() && s.back() == ' ') s.pop_back();
    s.push_back('.');
  }
  return s;
}

// 1. Before/after cleaning goldens.
void golden_cleaning(Check& c) {
  struct Pair {
    const char* before;
    const char* after;
  };
  const Pair pairs[] = {
      {"Madonna: i.e. Mary with the Christ-child, flowers: rose, historical persons (portraits and scenes from the "
       "life) (+ half-length portrait)",
       "Madonna: i.e. Mary with the Christ-child, flowers: rose, historical persons ."},
      {"adult woman, manuscript of musical score, writer, poet, author (+ portrait, self-portrait of artist), pen, "
       "ink-well, paper (writing material), codex, inscription, historical events and situations (1567), historical "
       "person (MONTENAY, Georgette de) - BB - woman - historical person (MONTENAY, Georgette de) portrayed alone, "
       "proverbs, sayings, etc. (O PLUME EN LA MAIN NON VAINE)",
       "adult woman, manuscript of musical score, writer, poet, author , pen, ink-well, paper , codex, inscription, "
       "historical events and situations , historical person, woman - historical person portrayed alone, proverbs, "
       "sayings."},
      {"plants and herbs (HELLEBORINE), plants and herbs (LUPINE),", "plants and herbs ."},
  };
  const auto t0 = Clock::now();
  int i = 0;
  for (const auto& p : pairs) {
    ++i;
    const auto got = clean_description(p.before);
    c.require(normalize_terminal(got) == normalize_terminal(p.after), "pair " + std::to_string(i) + ": \"" + got + "\"");
  }
  c.detail << (c.ok ? "" : "; ") << "3 pairs in " << seconds_since(t0) * 1e3 << " ms";
}

// 2. Per-example metric regression on the four shown caption pairs.
void metric_regression(Check& c) {
  const std::vector<CaptionLine> cands = {{"r1", "sailing - ship, sailing - boat."},
                                          {"r2", "head turned to the right, historical persons."},
                                          {"r3", "hand."},
                                          {"r4", "New Testament."}};
  const std::vector<CaptionLine> refs = {
      {"r1", "sea."},
      {"r2", "apostle, unspecified, key."},
      {"r3", "arms, fingers."},
      {"r4", "palace, king, New Testament, adoration of the kings: the Wise Men present their gifts to the "
             "Christ-child."}};
  const auto rep = evaluate(cands, refs);
  const auto& row4 = rep.examples[3].scores;
  std::ostringstream v;
  v << "row4 rouge_l=" << row4.rouge_l << " meteor=" << row4.meteor << " bleu1=" << row4.bleu[0];
  c.require(std::abs(row4.rouge_l - kRougeRow4) <= kRougeRow4Tol, "row4 ROUGE-L outside 0.184 +/- 0.01");
  c.require(std::abs(row4.meteor - kMeteorRow4) <= kMeteorRow4Tol, "row4 METEOR outside 0.0552 +/- 0.005");
  const double ratio = row4.bleu[0] / kBleu1Row4;
  c.require(ratio >= 1.0 / kBleu1Factor && ratio <= kBleu1Factor, "row4 BLEU1 not within factor 2 of 0.00055");
  for (int r : {1, 2}) {
    const auto& s = rep.examples[static_cast<std::size_t>(r)].scores;
    c.require(s.meteor == 0.0 && s.rouge_l == 0.0 && s.cider == 0.0,
              "row" + std::to_string(r + 1) + " METEOR/ROUGE-L/CIDEr not exactly 0");
  }
  c.detail << (c.ok ? "" : "; ") << v.str();
}

// 3. build -> split -> baseline -> eval through the command line on a
// synthetic 1,000-image corpus.
int cli(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "iconcap");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (code) std::fprintf(stderr, "%s", e.str().c_str());
  return code;
}

void end_to_end(Check& c) {
  test::TempDir dir("acceptance-e2e");
  std::mt19937_64 rng(42);
  const char* words[] = {"king", "palace", "sea", "ship", "rose", "Madonna", "apostle", "key", "hand", "woman"};
  std::string tsv;
  std::vector<std::string> codes;
  for (int i = 0; i < 200; ++i) {
    const auto code = std::to_string(10 + i % 80) + std::string(1, static_cast<char>('A' + i / 80)) +
                      (i % 3 ? "" : std::to_string(i % 7));
    codes.push_back(code);
    tsv += code + "\t" + words[rng() % 10] + " " + words[rng() % 10] + (i % 5 ? "" : " (+ detail)") + "\n";
  }
  nlohmann::ordered_json ann;
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> img;
    const auto n = 1 + rng() % 4;
    for (std::size_t k = 0; k < n; ++k) img.push_back(codes[rng() % codes.size()]);
    char id[16];
    std::snprintf(id, sizeof id, "img%04d", i);
    ann[id] = img;
  }
  test::write_file(dir.file("ann.json"), ann.dump());
  test::write_file(dir.file("corr.tsv"), tsv);

  const auto t0 = Clock::now();
  const auto split_dir = dir.file("splits");
  std::string eval_out;
  const bool ran =
      cli({"--quiet", "build", "--annotations", dir.file("ann.json"), "--correlates", dir.file("corr.tsv"), "--out",
           dir.file("records.jsonl")}) == 0 &&
      cli({"--quiet", "split", "--in", dir.file("records.jsonl"), "--val", "100", "--test", "100", "--out-dir",
           split_dir}) == 0 &&
      cli({"--quiet", "baseline", "--train", split_dir + "/train.jsonl", "--ids", split_dir + "/test.jsonl", "--out",
           dir.file("cands.jsonl")}) == 0 &&
      cli({"eval", "--candidates", dir.file("cands.jsonl"), "--references", split_dir + "/test.jsonl"}, &eval_out) ==
          0;
  const double secs = seconds_since(t0);
  c.require(ran, "pipeline exited non-zero");
  c.require(secs < kEndToEndSeconds, "took " + std::to_string(secs) + " s");
  if (ran) {
    const auto j = nlohmann::json::parse(eval_out);
    c.require(j["examples"].size() == 100, "expected 100 scored examples");
    for (const char* name : kScoreNames) {
      c.require(j["corpus"].contains(name), std::string("corpus lacks ") + name);
      const double hi = std::string(name) == "cider" ? 10.0 : 1.0;
      const double v = j["corpus"].value(name, -1.0);
      c.require(v >= 0.0 && v <= hi, std::string(name) + " out of range");
    }
    for (const auto& e : j["examples"]) {
      Scores s{};
      for (std::size_t n = 0; n < 4; ++n) s.bleu[n] = e["bleu" + std::to_string(n + 1)];
      s.meteor = e["meteor"];
      s.rouge_l = e["rouge_l"];
      s.cider = e["cider"];
      c.require(in_range(s), "example out of range");
    }
    c.detail << (c.ok ? "" : "; ") << "cider=" << j["corpus"]["cider"].get<double>() << ", ";
  }
  c.detail << secs << " s";
}

// 4. Metric properties on random corpora. BLEU_n is checked for n up to the
// candidate length, for identity and disjoint pairs alike.
std::size_t brute_force_lcs(const TokenSequence& a, const TokenSequence& b) {
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << a.size()); ++mask) {
    std::size_t j = 0, len = 0;
    bool ok = true;
    for (std::size_t i = 0; i < a.size() && ok; ++i) {
      if (!(mask & (1u << i))) continue;
      while (j < b.size() && b[j] != a[i]) ++j;
      if (j == b.size()) {
        ok = false;
      } else {
        ++j;
        ++len;
      }
    }
    if (ok) best = std::max(best, len);
  }
  return best;
}

double rouge_from_lcs(std::size_t l, std::size_t cand, std::size_t ref, double beta) {
  if (l == 0) return 0.0;
  const double p = static_cast<double>(l) / static_cast<double>(cand);
  const double r = static_cast<double>(l) / static_cast<double>(ref);
  const double b2 = beta * beta;
  return (1 + b2) * r * p / (r + b2 * p);
}

TokenSequence draw(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len, char first, int vocab) {
  TokenSequence t(std::uniform_int_distribution<std::size_t>(min_len, max_len)(rng));
  for (auto& w : t) w = std::string(1, static_cast<char>(first + static_cast<int>(rng() % vocab)));
  return t;
}

void metric_properties(Check& c) {
  std::mt19937_64 rng(2024);
  std::size_t pairs_checked = 0;
  double worst = 0.0;
  double short_bleu_max = 0.0;
  auto near = [&](double got, double want, const char* what) {
    worst = std::max(worst, std::abs(got - want));
    c.require(std::abs(got - want) <= kPropertyTol, what);
  };
  for (std::size_t corpus = 0; corpus < kPropertyCorpora && c.ok; ++corpus) {
    const int vocab = 1 + static_cast<int>(rng() % 8);
    const auto n = 1 + rng() % 10;

    // Random pairs against the brute-force LCS.
    std::vector<EvalPair> random_pairs;
    for (std::size_t i = 0; i < n; ++i)
      random_pairs.push_back({"r", draw(rng, 1, 10, 'a', vocab), {draw(rng, 1, 10, 'a', vocab)}});
    for (const auto& p : random_pairs) {
      const auto l = brute_force_lcs(p.candidate, p.references[0]);
      near(rouge_l(p), rouge_from_lcs(l, p.candidate.size(), p.references[0].size(), 1.2), "ROUGE-L != LCS oracle");
      ++pairs_checked;
    }
    const auto random_cider = cider(random_pairs);
    for (double s : random_cider.scores) c.require(s >= 0.0 && s <= 10.0, "CIDEr out of [0,10]");

    // Identity pairs over distinct sequences.
    std::vector<EvalPair> identity;
    std::vector<TokenSequence> seen;
    while (identity.size() < n) {
      auto t = draw(rng, 1, 10, 'a', vocab);
      if (std::find(seen.begin(), seen.end(), t) != seen.end()) {
        if (seen.size() >= n || vocab == 1) break;
        continue;
      }
      seen.push_back(t);
      identity.push_back({"i", t, {t}});
    }
    const auto id_cider = cider(identity);
    for (std::size_t i = 0; i < identity.size(); ++i) {
      const auto& p = identity[i];
      near(rouge_l(p), 1.0, "identity ROUGE-L != 1");
      for (std::size_t k = 1; k <= std::min<std::size_t>(4, p.candidate.size()); ++k)
        near(bleu(p, k), 1.0, "identity BLEU_n != 1");
      near(id_cider.scores[i], 10.0, "identity CIDEr != 10");
    }

    // Disjoint pairs: candidate vocabulary a.., reference vocabulary q...
    std::vector<EvalPair> disjoint;
    const int half = std::max(1, vocab / 2);
    for (std::size_t i = 0; i < n; ++i)
      disjoint.push_back({"d", draw(rng, 1, 10, 'a', half), {draw(rng, 1, 10, 'q', std::max(1, vocab - half))}});
    const auto dj_cider = cider(disjoint);
    for (std::size_t i = 0; i < disjoint.size(); ++i) {
      const auto& p = disjoint[i];
      near(rouge_l(p), 0.0, "disjoint ROUGE-L != 0");
      near(meteor(p), 0.0, "disjoint METEOR != 0");
      // n above the candidate length has no n-grams to compare; the smoothed
      // value there is fixed by the per-example regression instead.
      for (std::size_t k = 1; k <= 4; ++k) {
        if (k <= p.candidate.size()) {
          near(bleu(p, k), 0.0, "disjoint BLEU_n != 0");
        } else {
          short_bleu_max = std::max(short_bleu_max, bleu(p, k));
        }
      }
      near(dj_cider.scores[i], 0.0, "disjoint CIDEr != 0");
    }
  }
  c.detail << (c.ok ? "" : "; ") << kPropertyCorpora << " corpora, " << pairs_checked
           << " LCS pairs, max deviation " << worst << ", disjoint BLEU_n with n > length up to " << short_bleu_max;
}

// 5. Split arithmetic and determinism.
void split_determinism(Check& c) {
  constexpr std::size_t kIds = 86'530;
  std::vector<CaptionRecord> records(kIds);
  for (std::size_t i = 0; i < kIds; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "%07zu", i * 7919 % 10'000'000);
    records[i] = {id, "", "caption " + std::to_string(i % 97) + ".", Split::unassigned};
  }
  const SplitConfig cfg{17, 5000, 5000};
  auto summary = [](const std::vector<CaptionRecord>& rs) {
    std::array<std::size_t, 4> counts{};
    std::string assignment;
    for (const auto& r : rs) {
      ++counts[static_cast<std::size_t>(r.split)];
      assignment += r.image_id + std::string(to_string(r.split));
    }
    return std::make_pair(counts, assignment);
  };
  const auto a = summary(assign_splits(records, cfg));
  const auto b = summary(assign_splits(records, cfg));
  std::mt19937_64 rng(1);
  std::shuffle(records.begin(), records.end(), rng);
  const auto shuffled = summary(assign_splits(records, cfg));
  std::reverse(records.begin(), records.end());
  const auto reversed = summary(assign_splits(records, cfg));
  const auto other_seed = summary(assign_splits(records, {18, 5000, 5000}));

  const auto& n = a.first;
  c.require(n[static_cast<std::size_t>(Split::train)] == 76'530 && n[static_cast<std::size_t>(Split::val)] == 5000 &&
                n[static_cast<std::size_t>(Split::test)] == 5000 && n[0] == 0,
            "wrong split sizes");
  c.require(a == b, "differs across runs");
  c.require(a == shuffled && a == reversed, "depends on input order");
  c.require(a.second != other_seed.second, "seed has no effect");
  c.detail << (c.ok ? "" : "; ") << n[1] << "/" << n[2] << "/" << n[3];
}

// 6. Parser fuzz with round-trip.
void parser_fuzz(Check& c) {
  std::mt19937_64 rng(6);
  const std::string alphabet = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabc()+ ,.-:\t";
  std::size_t accepted = 0, rejected = 0;
  for (std::size_t i = 0; i < kFuzzCases; ++i) {
    std::string s(rng() % 16, '\0');
    // Half arbitrary bytes, half drawn from notation-like characters so that
    // a useful share is accepted.
    for (auto& ch : s) ch = i % 2 ? static_cast<char>(rng() & 0xff) : alphabet[rng() % alphabet.size()];
    try {
      const auto n = parse_notation(s);
      ++accepted;
      const auto text = n.normalized();
      const auto again = parse_notation(text);
      if (!(again == n) || again.normalized() != text) {
        c.require(false, "round trip failed for \"" + s + "\"");
        break;
      }
    } catch (const MalformedNotation&) {
      ++rejected;
    } catch (const std::exception& e) {
      c.require(false, std::string("unexpected exception: ") + e.what());
      break;
    }
  }
  c.detail << (c.ok ? "" : "; ") << accepted << " accepted, " << rejected << " rejected";
}

// 7. Genre distribution on a corpus with known counts.
void genre_sanity(Check& c) {
  const std::vector<std::string> phrases = {"sea", "ship", "rose", "king", "hand"};
  const std::vector<std::string> genres = {"landscape", "marine", "portrait", "still life"};
  // expected[p][g]
  const std::vector<std::vector<std::size_t>> expected = {
      {4, 9, 0, 1}, {0, 7, 0, 0}, {0, 0, 2, 6}, {0, 1, 5, 0}, {1, 0, 3, 2}};
  std::vector<GenreRecord> rows;
  std::mt19937_64 rng(7);
  // Spread the occurrences over multi-segment captions: each record takes a
  // phrase at most once so segment counts stay exact.
  for (std::size_t g = 0; g < genres.size(); ++g) {
    std::vector<std::size_t> left(phrases.size());
    for (std::size_t p = 0; p < phrases.size(); ++p) left[p] = expected[p][g];
    for (int id = 0;; ++id) {
      std::string caption;
      for (std::size_t p = 0; p < phrases.size(); ++p) {
        if (left[p] && rng() % 2) {
          --left[p];
          caption += (caption.empty() ? "" : ", ") + phrases[p];
        }
      }
      if (!caption.empty()) rows.push_back({genres[g] + std::to_string(id), genres[g], caption + "."});
      if (std::all_of(left.begin(), left.end(), [](auto n) { return n == 0; })) break;
    }
  }
  const auto d = genre_distribution(rows, kUnboundedTopK);
  c.require(d.genres == genres, "genre columns");
  // Ranked by total: sea 14, rose 8, ship 7, hand 6, king 6.
  const std::vector<std::string> order = {"sea", "rose", "ship", "hand", "king"};
  c.require(d.phrases == order, "phrase ranking");
  for (std::size_t i = 0; i < d.phrases.size() && c.ok; ++i) {
    const auto p = static_cast<std::size_t>(std::find(phrases.begin(), phrases.end(), d.phrases[i]) - phrases.begin());
    c.require(d.counts[i] == expected[p], "counts for " + d.phrases[i]);
  }
  std::ostringstream base;
  write_csv(base, d);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(rows.begin(), rows.end(), rng);
    std::ostringstream again;
    write_csv(again, genre_distribution(rows, kUnboundedTopK));
    c.require(again.str() == base.str(), "output changes under row permutation");
    if (!c.ok) break;
  }
  c.detail << (c.ok ? "" : "; ") << rows.size() << " rows, 20 permutations";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Check&)>>> criteria = {
      {"golden cleaning pairs", golden_cleaning},
      {"per-example metric regression", metric_regression},
      {"end-to-end pipeline on 1,000 synthetic images", end_to_end},
      {"metric property suite", metric_properties},
      {"split determinism and sizes", split_determinism},
      {"parser fuzz and round trip", parser_fuzz},
      {"genre distribution sanity", genre_sanity},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Check c;
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %d %s: %s\n", c.ok ? "PASS" : "FAIL", index, name, c.detail.str().c_str());
    failed += c.ok ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}

#pragma once

// Command-line front end. `run` is separate from main() so tests can drive
// it with captured streams.
//
// Exit status: 0 success, 1 domain error, 2 usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "iconcap/iconcap.hpp"

namespace iconcap::cli {

namespace detail {

using ordered_json = nlohmann::ordered_json;

struct Globals {
  std::uint64_t seed = 0;
  std::string report;
  bool x100 = false;
  bool quiet = false;
  unsigned jobs = 0;
};

inline ordered_json tool_info() { return {{"name", "iconcap"}, {"version", kVersion}}; }

// The run report goes to --report when given, else to the error stream.
inline void emit_report(const Globals& g, ordered_json report, std::ostream& err) {
  const auto text = report.dump(2) + "\n";
  if (!g.report.empty()) {
    std::ofstream out(g.report, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure(g.report, "cannot open report for writing");
    out << text;
  } else if (!g.quiet) {
    err << text;
  }
}

inline std::vector<std::string> read_ids(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure(path, "cannot open id file");
  std::vector<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto t = iconcap::detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '{') {
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(t);
      } catch (const nlohmann::json::parse_error& e) {
        throw SchemaViolation(path + ":" + std::to_string(lineno), e.what());
      }
      ids.push_back(iconcap::detail::string_field(obj, "image_id", path + ":" + std::to_string(lineno)));
    } else {
      ids.emplace_back(t);
    }
  }
  return ids;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure(path, "cannot open for writing");
  out << text;
  if (!out) throw IoFailure(path, "write failed");
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using detail::ordered_json;

  CLI::App app{"Iconclass caption dataset builder and caption metric suite", "iconcap"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kVersion));

  detail::Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice");
  app.add_option("--report", g.report, "Write the run report JSON here instead of stderr");
  app.add_flag("--x100", g.x100, "Present scores multiplied by 100");
  app.add_flag("--quiet", g.quiet, "Do not print the run report");
  app.add_option("--jobs", g.jobs, "Worker threads (0 = logical cores)");

  // parse
  auto* parse_cmd = app.add_subcommand("parse", "Parse an Iconclass notation and print it as JSON");
  std::string code;
  parse_cmd->add_option("code", code, "Notation, e.g. 73A(+1)")->required();

  // build
  auto* build_cmd = app.add_subcommand("build", "Build cleaned caption records from code annotations");
  std::string annotations_path, correlates_path, build_out;
  std::string stoplist = "BB";
  bool fallback = false, keep_etc = false, no_dedup = false;
  build_cmd->add_option("--annotations", annotations_path, "Annotation JSON")->required();
  build_cmd->add_option("--correlates", correlates_path, "Correlate TSV (or .json)")->required();
  build_cmd->add_option("--out", build_out, "Caption record JSONL")->required();
  build_cmd->add_flag("--fallback", fallback, "Resolve unknown codes through their parents");
  build_cmd->add_option("--stoplist", stoplist, "Comma-separated uppercase codes to drop");
  build_cmd->add_flag("--keep-etc", keep_etc, "Keep literal \", etc.\"");
  build_cmd->add_flag("--no-dedup", no_dedup, "Keep repeated comma segments");

  // split
  auto* split_cmd = app.add_subcommand("split", "Assign train/val/test splits");
  std::string split_in, split_dir = ".";
  std::size_t n_val = 5000, n_test = 5000;
  split_cmd->add_option("--in", split_in, "Caption record JSONL from build")->required();
  split_cmd->add_option("--val", n_val, "Validation size");
  split_cmd->add_option("--test", n_test, "Test size");
  split_cmd->add_option("--out-dir", split_dir, "Directory for splits.jsonl, train/val/test.jsonl");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score candidate captions against references");
  std::string cand_path, ref_path, eval_out, eval_csv, synonyms_path;
  metrics::EvalConfig eval_cfg;
  eval_cmd->add_option("--candidates", cand_path, "Candidate JSONL")->required();
  eval_cmd->add_option("--references", ref_path, "Reference JSONL")->required();
  eval_cmd->add_option("--out", eval_out, "Write the metric report JSON here (default stdout)");
  eval_cmd->add_option("--csv", eval_csv, "Also write per-example CSV");
  eval_cmd->add_flag("--keep-punctuation", eval_cfg.keep_punctuation, "Score punctuation tokens too");
  eval_cmd->add_option("--beta", eval_cfg.rouge_beta, "ROUGE-L recall weight");
  eval_cmd->add_option("--alpha", eval_cfg.meteor.alpha, "METEOR alpha");
  eval_cmd->add_option("--gamma", eval_cfg.meteor.gamma, "METEOR fragmentation weight");
  eval_cmd->add_option("--theta", eval_cfg.meteor.theta, "METEOR fragmentation exponent");
  eval_cmd->add_option("--epsilon", eval_cfg.bleu_smoothing.epsilon, "BLEU zero-count smoothing numerator");
  eval_cmd->add_option("--synonyms", synonyms_path, "Synonym groups, one comma-separated group per line");

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Caption analyses");
  analyze_cmd->require_subcommand(1);
  auto* genres_cmd = analyze_cmd->add_subcommand("genres", "Phrase x genre distribution CSV");
  std::string genres_csv, genre_captions, genres_out, unit_name = "segment";
  std::size_t top_k = 20;
  genres_cmd->add_option("--genres", genres_csv, "image_id,genre CSV")->required();
  genres_cmd->add_option("--captions", genre_captions, "Caption JSONL")->required();
  genres_cmd->add_option("--top", top_k, "Number of phrases (0 = all)");
  genres_cmd->add_option("--unit", unit_name, "segment or whole")->check(CLI::IsMember({"segment", "whole"}));
  genres_cmd->add_option("--out", genres_out, "Output CSV (default stdout)");
  auto* lengths_cmd = analyze_cmd->add_subcommand("lengths", "Caption length statistics");
  std::string lengths_in;
  lengths_cmd->add_option("--in", lengths_in, "Caption JSONL")->required();

  // baseline
  auto* baseline_cmd = app.add_subcommand("baseline", "Most-frequent-caption stand-in captioner");
  std::string train_path, ids_path, baseline_out;
  baseline_cmd->add_option("--train", train_path, "Training caption JSONL")->required();
  baseline_cmd->add_option("--ids", ids_path, "Test ids: JSONL with image_id, or one id per line")->required();
  baseline_cmd->add_option("--out", baseline_out, "Candidate JSONL")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "iconcap: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    ordered_json report;
    report["tool"] = detail::tool_info();

    if (*parse_cmd) {
      const auto n = parse_notation(code);
      const nlohmann::json j{{"base", n.base}, {"qualifiers", n.qualifiers}, {"keys", n.keys}};
      out << j.dump() << '\n';
      return 0;
    }

    if (*build_cmd) {
      BuildOptions opts;
      opts.cleaning.uppercase_stoplist = detail::split_list(stoplist);
      opts.cleaning.drop_etc = !keep_etc;
      opts.cleaning.dedup = !no_dedup;
      opts.fallback = fallback;
      opts.jobs = g.jobs;
      validate(opts.cleaning);
      const auto annotations = load_annotations(annotations_path);
      const auto store = CorrelateStore::from_file(correlates_path);
      const auto built = build_dataset(annotations, store, opts);
      write_records_file(build_out, built.records);
      report["config"] = {{"annotations", annotations_path},
                          {"correlates", correlates_path},
                          {"out", build_out},
                          {"fallback", fallback},
                          {"stoplist", opts.cleaning.uppercase_stoplist},
                          {"drop_etc", opts.cleaning.drop_etc},
                          {"dedup", opts.cleaning.dedup}};
      report["input"] = built.report.input;
      report["kept"] = built.report.kept;
      report["dropped_empty"] = built.report.dropped_empty;
      report["unresolved_codes"] = built.report.unresolved_codes;
      detail::emit_report(g, report, err);
      return 0;
    }

    if (*split_cmd) {
      const auto records = assign_splits(read_records_file(split_in), {g.seed, n_val, n_test});
      std::filesystem::create_directories(split_dir);
      const auto dir = std::filesystem::path(split_dir);
      write_records_file((dir / "splits.jsonl").string(), records);
      ordered_json counts;
      for (auto s : {Split::train, Split::val, Split::test})
        counts[std::string(to_string(s))] =
            export_jsonl(records, (dir / (std::string(to_string(s)) + ".jsonl")).string(), s);
      report["config"] = {{"in", split_in}, {"seed", g.seed}, {"val", n_val}, {"test", n_test}, {"out_dir", split_dir}};
      report["counts"] = counts;
      detail::emit_report(g, report, err);
      return 0;
    }

    if (*eval_cmd) {
      metrics::SynonymTable synonyms;
      if (!synonyms_path.empty()) {
        std::ifstream in(synonyms_path, std::ios::binary);
        if (!in) throw IoFailure(synonyms_path, "cannot open synonym file");
        std::string line;
        while (std::getline(in, line)) {
          auto words = detail::split_list(line);
          for (auto& w : words) w = std::string(iconcap::detail::trim(w));
          if (words.size() > 1) synonyms.add_group(words);
        }
        eval_cfg.synonyms = &synonyms;
      }
      eval_cfg.jobs = g.jobs;
      const auto metric_report = metrics::evaluate_files(cand_path, ref_path, eval_cfg);
      auto j = metrics::to_json(metric_report, g.x100);
      j["tool"] = detail::tool_info();
      j["config"] = {{"candidates", cand_path},
                     {"references", ref_path},
                     {"x100", g.x100},
                     {"keep_punctuation", eval_cfg.keep_punctuation},
                     {"rouge_beta", eval_cfg.rouge_beta},
                     {"meteor", {{"alpha", eval_cfg.meteor.alpha},
                                 {"gamma", eval_cfg.meteor.gamma},
                                 {"theta", eval_cfg.meteor.theta}}},
                     {"bleu_smoothing", {{"epsilon", eval_cfg.bleu_smoothing.epsilon},
                                         {"floor", eval_cfg.bleu_smoothing.floor}}},
                     {"synonyms", synonyms_path}};
      const auto text = j.dump(2) + "\n";
      if (eval_out.empty()) {
        out << text;
      } else {
        detail::write_text_file(eval_out, text);
      }
      if (!eval_csv.empty()) {
        std::ostringstream csv;
        metrics::write_csv(csv, metric_report, g.x100);
        detail::write_text_file(eval_csv, csv.str());
      }
      if (!g.report.empty()) detail::emit_report(g, j, err);
      return 0;
    }

    if (*genres_cmd) {
      std::ifstream in(genres_csv, std::ios::binary);
      if (!in) throw IoFailure(genres_csv, "cannot open genre CSV");
      const auto records = join_genres(read_genre_csv(in, genres_csv), read_captions_file(genre_captions));
      const auto unit = unit_name == "whole" ? PhraseUnit::whole_caption : PhraseUnit::segment;
      const auto dist = genre_distribution(records, top_k == 0 ? kUnboundedTopK : top_k, unit);
      std::ostringstream csv;
      write_csv(csv, dist);
      if (genres_out.empty()) {
        out << csv.str();
      } else {
        detail::write_text_file(genres_out, csv.str());
      }
      report["config"] = {{"genres", genres_csv}, {"captions", genre_captions}, {"top", top_k}, {"unit", unit_name}};
      report["records"] = records.size();
      detail::emit_report(g, report, err);
      return 0;
    }

    if (*lengths_cmd) {
      std::vector<std::string> captions;
      for (auto& c : read_captions_file(lengths_in)) captions.push_back(std::move(c.caption));
      const auto s = length_stats(captions);
      ordered_json j{{"count", s.count}, {"mean", s.mean}, {"median", s.median}, {"min", s.min},
                     {"max", s.max},     {"bucket_width", kHistogramBucket},      {"histogram", s.histogram}};
      out << j.dump(2) << '\n';
      return 0;
    }

    if (*baseline_cmd) {
      std::vector<std::string> train;
      for (auto& c : read_captions_file(train_path)) train.push_back(std::move(c.caption));
      const auto candidates = frequency_baseline(train, detail::read_ids(ids_path));
      write_captions_file(baseline_out, candidates);
      report["config"] = {{"train", train_path}, {"ids", ids_path}, {"out", baseline_out}};
      report["written"] = candidates.size();
      if (!candidates.empty()) report["caption"] = candidates.front().caption;
      detail::emit_report(g, report, err);
      return 0;
    }
  } catch (const MalformedNotation& e) {
    err << "iconcap: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "iconcap: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "iconcap: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "iconcap: " << e.what() << '\n';
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace iconcap::cli

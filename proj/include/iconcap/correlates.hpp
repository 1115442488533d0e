#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

#include <nlohmann/json.hpp>

#include "iconcap/error.hpp"
#include "iconcap/notation.hpp"

namespace iconcap {

/// Notation -> English textual correlate. Immutable once built; safe for
/// concurrent readers.
class CorrelateStore {
public:
  CorrelateStore() = default;

  /// Keys are normalized through parse_notation. Throws SchemaViolation on an
  /// unparseable key or an empty correlate.
  explicit CorrelateStore(const std::map<std::string, std::string>& entries) {
    for (const auto& [code, text] : entries) insert(code, text, code);
  }

  /// `notation<TAB>english text` per line; blank lines and lines starting
  /// with '#' are skipped.
  static CorrelateStore from_tsv(std::istream& in, const std::string& source = "<tsv>") {
    CorrelateStore store;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      const auto where = source + ":" + std::to_string(lineno);
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw SchemaViolation(where, "expected notation<TAB>text");
      store.insert(line.substr(0, tab), line.substr(tab + 1), where);
    }
    return store;
  }

  static CorrelateStore from_tsv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure(path, "cannot open correlate file");
    return from_tsv(in, path);
  }

  /// JSON object {"notation": "text", ...}.
  static CorrelateStore from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw SchemaViolation("<root>", "correlates must be a JSON object");
    CorrelateStore store;
    for (const auto& [code, text] : doc.items()) {
      if (!text.is_string()) throw SchemaViolation(code, "correlate must be a string");
      store.insert(code, text.get<std::string>(), code);
    }
    return store;
  }

  static CorrelateStore from_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure(path, "cannot open correlate file");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw IoFailure(path, e.what());
    }
    return from_json(doc);
  }

  /// Picks the loader from the extension: ".json" is JSON, anything else TSV.
  static CorrelateStore from_file(const std::string& path) {
    const std::string_view p(path);
    if (p.size() >= 5 && p.substr(p.size() - 5) == ".json") return from_json_file(path);
    return from_tsv_file(path);
  }

  /// Exact match on a normalized notation string.
  const std::string* find(const std::string& normalized) const {
    auto it = entries_.find(normalized);
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

private:
  void insert(const std::string& code, std::string text, const std::string& where) {
    std::string key;
    try {
      key = parse_notation(code).normalized();
    } catch (const MalformedNotation& e) {
      throw SchemaViolation(where, e.what());
    }
    if (text.empty()) throw SchemaViolation(where, "empty correlate text");
    entries_.insert_or_assign(std::move(key), std::move(text));
  }

  std::map<std::string, std::string> entries_;
};

/// Looks up the correlate of `n`. With `fallback`, walks the parent chain
/// until a hit.
inline std::optional<std::string> correlate(const IconclassNotation& n, const CorrelateStore& store,
                                            bool fallback = false) {
  std::optional<IconclassNotation> cur = n;
  while (cur) {
    if (const auto* text = store.find(cur->normalized())) return *text;
    if (!fallback) break;
    cur = parent(*cur);
  }
  return std::nullopt;
}

}  // namespace iconcap

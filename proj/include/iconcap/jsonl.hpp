#pragma once

// Line-delimited JSON readers and writers for captions and caption records.

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iconcap/caption.hpp"
#include "iconcap/error.hpp"

namespace iconcap {

/// {"image_id": ..., "caption": ...}
struct CaptionLine {
  std::string image_id;
  std::string caption;

  friend bool operator==(const CaptionLine&, const CaptionLine&) = default;
};

namespace detail {

template <class Fn>
void for_each_json_line(std::istream& in, const std::string& source, Fn&& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto where = source + ":" + std::to_string(lineno);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaViolation(where, e.what());
    }
    if (!obj.is_object()) throw SchemaViolation(where, "line is not a JSON object");
    fn(obj, where);
  }
}

inline std::string string_field(const nlohmann::json& obj, const char* name, const std::string& where) {
  auto it = obj.find(name);
  if (it == obj.end() || !it->is_string())
    throw SchemaViolation(where, std::string("missing string field \"") + name + "\"");
  return it->get<std::string>();
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure(path, "cannot open for reading");
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure(path, "cannot open for writing");
  return out;
}

}  // namespace detail

inline std::vector<CaptionLine> read_captions(std::istream& in, const std::string& source = "<jsonl>") {
  std::vector<CaptionLine> out;
  detail::for_each_json_line(in, source, [&](const nlohmann::json& obj, const std::string& where) {
    out.push_back({detail::string_field(obj, "image_id", where), detail::string_field(obj, "caption", where)});
  });
  return out;
}

inline std::vector<CaptionLine> read_captions_file(const std::string& path) {
  auto in = detail::open_in(path);
  return read_captions(in, path);
}

inline void write_caption(std::ostream& out, const CaptionLine& line) {
  out << nlohmann::ordered_json{{"image_id", line.image_id}, {"caption", line.caption}}.dump() << '\n';
}

inline void write_captions_file(const std::string& path, const std::vector<CaptionLine>& lines) {
  auto out = detail::open_out(path);
  for (const auto& l : lines) write_caption(out, l);
  if (!out) throw IoFailure(path, "write failed");
}

// Full caption records: {"image_id", "raw", "caption", "split"}.

inline void write_records(std::ostream& out, const std::vector<CaptionRecord>& records) {
  for (const auto& r : records) {
    nlohmann::ordered_json obj{{"image_id", r.image_id},
                               {"raw", r.raw_description},
                               {"caption", r.clean_description},
                               {"split", std::string(to_string(r.split))}};
    out << obj.dump() << '\n';
  }
}

inline void write_records_file(const std::string& path, const std::vector<CaptionRecord>& records) {
  auto out = detail::open_out(path);
  write_records(out, records);
  if (!out) throw IoFailure(path, "write failed");
}

inline std::vector<CaptionRecord> read_records(std::istream& in, const std::string& source = "<jsonl>") {
  std::vector<CaptionRecord> out;
  detail::for_each_json_line(in, source, [&](const nlohmann::json& obj, const std::string& where) {
    CaptionRecord r;
    r.image_id = detail::string_field(obj, "image_id", where);
    r.clean_description = detail::string_field(obj, "caption", where);
    if (obj.contains("raw")) r.raw_description = detail::string_field(obj, "raw", where);
    if (obj.contains("split")) r.split = split_from_string(detail::string_field(obj, "split", where));
    out.push_back(std::move(r));
  });
  return out;
}

inline std::vector<CaptionRecord> read_records_file(const std::string& path) {
  auto in = detail::open_in(path);
  return read_records(in, path);
}

}  // namespace iconcap

#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iconcap/error.hpp"

namespace iconcap {

struct AnnotationRecord {
  std::string image_id;
  std::vector<std::string> codes;  // source order

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

/// Accepts {"image.jpg": ["73", "11F"], ...}. Records keep file order; empty
/// code arrays are kept.
inline std::vector<AnnotationRecord> annotations_from_json(const nlohmann::ordered_json& doc) {
  if (!doc.is_object()) throw SchemaViolation("<root>", "annotations must be a JSON object");
  std::vector<AnnotationRecord> out;
  out.reserve(doc.size());
  for (const auto& [image_id, codes] : doc.items()) {
    if (!codes.is_array()) throw SchemaViolation(image_id, "value must be an array of notations");
    AnnotationRecord rec{image_id, {}};
    rec.codes.reserve(codes.size());
    for (const auto& code : codes) {
      if (!code.is_string()) throw SchemaViolation(image_id, "notation must be a string");
      rec.codes.push_back(code.get<std::string>());
    }
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::vector<AnnotationRecord> load_annotations(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure(path, "cannot open annotation file");
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoFailure(path, e.what());
  }
  return annotations_from_json(doc);
}

}  // namespace iconcap

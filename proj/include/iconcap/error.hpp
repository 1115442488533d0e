#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iconcap {

/// Base of every domain error raised by the library. The CLI maps these to
/// exit status 1.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class MalformedNotation : public Error {
public:
  MalformedNotation(std::size_t offset, const std::string& what)
      : Error("malformed notation at offset " + std::to_string(offset) + ": " + what),
        offset_(offset) {}

  /// Byte offset of the first offending character.
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

class IoFailure : public Error {
public:
  IoFailure(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

class SchemaViolation : public Error {
public:
  SchemaViolation(const std::string& key, const std::string& what)
      : Error("schema violation at \"" + key + "\": " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

class NoResolvableCodes : public Error {
public:
  explicit NoResolvableCodes(const std::string& image_id)
      : Error("no code of \"" + image_id + "\" resolves to a correlate"), image_id_(image_id) {}
  const std::string& image_id() const noexcept { return image_id_; }

private:
  std::string image_id_;
};

class InsufficientRecords : public Error {
public:
  InsufficientRecords(std::size_t have, std::size_t need)
      : Error("split needs " + std::to_string(need) + " records, have " + std::to_string(have)) {}
};

class EmptyCorpus : public Error {
public:
  EmptyCorpus() : Error("empty evaluation corpus") {}
};

class EmptyInput : public Error {
public:
  explicit EmptyInput(const std::string& what) : Error("empty input: " + what) {}
};

class MissingReference : public Error {
public:
  explicit MissingReference(const std::string& id)
      : Error("no reference for image_id \"" + id + "\""), id_(id) {}
  const std::string& id() const noexcept { return id_; }

private:
  std::string id_;
};

class DuplicateId : public Error {
public:
  explicit DuplicateId(const std::string& id)
      : Error("duplicate image_id \"" + id + "\""), id_(id) {}
  const std::string& id() const noexcept { return id_; }

private:
  std::string id_;
};

}  // namespace iconcap

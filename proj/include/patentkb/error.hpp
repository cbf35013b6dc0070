#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace patentkb {

/// Input or argument that violates a documented contract. Maps to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}

  ValidationError(const std::string& what, std::size_t line, std::string field = {})
      : std::runtime_error(what), line_(line), field_(std::move(field)) {}

  /// 1-based line of the offending record, when the error came from a stream.
  std::optional<std::size_t> line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::optional<std::size_t> line_;
  std::string field_;
};

/// File system failure (missing input, unwritable output). Maps to exit code 2.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace patentkb

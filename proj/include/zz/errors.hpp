#pragma once

#include <stdexcept>
#include <string>

namespace zz {

/// Violation of a documented precondition or value-domain constraint
/// (non-finite input, empty denominator set, bad group size, ...).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Transport-level failure talking to a policy client.
class ClientError : public std::runtime_error {
 public:
  enum class Kind { Timeout, Protocol };

  ClientError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Malformed input file; carries the 1-based line number for diagnostics.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  size_t line() const { return line_; }

 private:
  size_t line_;
};

}  // namespace zz

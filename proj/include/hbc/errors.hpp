#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hbc {

// Base for every error raised by the library. The CLI maps the concrete
// subclasses onto exit codes (config → 2, data → 3, numerical → 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical precondition violated (C_B <= 0, cutoff above Nyquist, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A model failed to train (non-finite loss, single class, ...).
class TrainingError : public Error {
 public:
  using Error::Error;
};

// Data did not match an expected schema: missing channel, manifest hash
// mismatch, unmapped label.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Malformed file content at a known line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// File structure (header, sidecar) does not match the contract.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A session loaded fine but violates its invariants.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "session validation failed";
    for (const auto& s : v) out += "; " + s;
    return out;
  }
  std::vector<std::string> violations_;
};

// Run configuration rejected before any work started.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string key)
      : Error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace hbc

// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace semx {

/// Base for every error raised by the library. The CLI maps these to exit
/// code 1 (data errors); UsageError maps to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line` is 1-based (0 if unknown), `offset` is a
/// 0-based byte offset into the offending line or string.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t offset)
      : Error(what), line_(line), offset_(offset) {}
  std::size_t line() const { return line_; }
  std::size_t offset() const { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

/// A corpus failed validation; `offenders` lists one message per violation.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::vector<std::string> offenders)
      : Error(what), offenders_(std::move(offenders)) {}
  const std::vector<std::string>& offenders() const { return offenders_; }

 private:
  std::vector<std::string> offenders_;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

/// Grounding failure: an annotation names an entity the context lacks.
class GroundingError : public Error {
 public:
  using Error::Error;
};

/// Caller broke a documented precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Similarity is undefined (zero vector, degenerate matrix).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// A derivation recipe has nothing to draw from.
class EmptyRecipeError : public Error {
 public:
  using Error::Error;
};

/// File format/version mismatch.
class FormatError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace semx

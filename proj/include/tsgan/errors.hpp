// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tsgan {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible tensor shapes, bad axes, or a batch that is too small.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Input outside the mathematical domain of an operation (log1p(x <= -1) ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Caller broke an API precondition (non-scalar loss, mismatched histograms ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Non-finite loss or gradient encountered during optimization.
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// A channel with zero variance cannot be standardized.
class DegenerateChannelError : public Error {
 public:
  using Error::Error;
};

/// Not enough data for the requested operation.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Invalid or unknown configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. Carries the 1-based line number of the offending row.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed rows that violate a file-level rule (spacing, magic, version).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Binary payload failed its integrity check or ended early.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

}  // namespace tsgan

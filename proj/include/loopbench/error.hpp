// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace loopbench {

enum class ErrorKind {
  invalid_instance,
  invalid_argument,
  dimension,
  capacity,
  degenerate_series,
  insufficient_data,
  sequencing,
  parse,
  validation,
  transport,
  auth,
  script_gap,
  format,
  config,
  usage,
  aborted_run,
};

std::string_view to_string(ErrorKind kind);

/// Base for every error raised by the library. `kind()` is the stable,
/// machine-readable category; `what()` is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A model response that could not be turned into a decision. Keeps the
/// offending payload so it can be written to the trace.
class DecisionError : public Error {
 public:
  DecisionError(ErrorKind kind, const std::string& message, std::string raw)
      : Error(kind, message), raw_(std::move(raw)) {}

  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

class TransportError : public Error {
 public:
  TransportError(ErrorKind kind, const std::string& message, int attempts, int last_status)
      : Error(kind, message), attempts_(attempts), last_status_(last_status) {}

  int attempts() const noexcept { return attempts_; }
  /// HTTP status of the last attempt, 0 when no response was received.
  int last_status() const noexcept { return last_status_; }

 private:
  int attempts_;
  int last_status_;
};

}  // namespace loopbench

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace boolsearch {

/// A caller broke an operation's precondition (empty gold set, group of one, bad config).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input data: corpus/topic lines, config files, XML.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& message, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(message), line_(line), column_(column) {}

  /// 1-based line of the offending input, 0 when not applicable.
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Network or service failure. Never scored as a model failure.
class TransportError : public std::runtime_error {
 public:
  explicit TransportError(const std::string& message, int status = 0, bool retryable = true)
      : std::runtime_error(message), status_(status), retryable_(retryable) {}

  int status() const noexcept { return status_; }
  bool retryable() const noexcept { return retryable_; }

 private:
  int status_;
  bool retryable_;
};

/// The executing system refused the query itself (translation failure, runaway wildcard).
class QueryRejected : public std::runtime_error {
 public:
  enum class Reason { unparseable, too_broad };

  QueryRejected(Reason reason, const std::string& message)
      : std::runtime_error(message), reason_(reason) {}

  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

}  // namespace boolsearch

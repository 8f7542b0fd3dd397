#pragma once

#include <stdexcept>
#include <string>

namespace pmlab {

/// Caller handed an argument outside an operation's documented domain.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical contract that must hold by construction was found broken.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed data file; carries the offending row when known.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg, long row = -1)
      : std::runtime_error(row >= 0 ? msg + " (row " + std::to_string(row) + ")" : msg),
        row_(row) {}
  long row() const { return row_; }

 private:
  long row_;
};

}  // namespace pmlab

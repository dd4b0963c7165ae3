#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cwlab {

/// Base class for every error raised by the library. `kind()` is a short
/// stable tag used in machine-readable error objects.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Unknown vertex, self-loop, overlapping sides and similar input errors.
class GraphError : public Error {
 public:
  explicit GraphError(const std::string& what) : Error("graph", what) {}
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what)
      : Error("precondition", what) {}
};

/// Raised when a search hits its node or time budget before reaching a
/// verdict. Distinct from a negative answer.
class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(const std::string& what) : Error("budget", what) {}
};

/// A claimed bound or structural property failed to hold on a concrete
/// instance. Never swallowed.
class InvariantViolation : public Error {
 public:
  explicit InvariantViolation(const std::string& what)
      : Error("invariant", what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error("parse", what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace cwlab

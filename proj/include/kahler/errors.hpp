#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kahler {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by parse_expr. offset is the byte offset into the source text.
class ParseError : public Error {
 public:
  enum class Kind { syntax, unknown_identifier, arity };

  ParseError(Kind kind, std::size_t offset, const std::string& what);

  Kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

class EvalError : public Error {
 public:
  enum class Kind { unbound_variable, domain };

  EvalError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// A chart point or trajectory left the domain of a surface chart.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Degenerate linear algebra: null frames, singular induced metrics, rank loss.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// An operation was called on input that violates its documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace kahler

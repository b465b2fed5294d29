#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lrbisim {

/// Rejected input: a malformed system, relation, or argument outside the
/// operation's domain.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Syntax error in one of the text formats. `line` is 1-based, 0 when the
/// document as a whole is malformed.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
    : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
      line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// A construction produced something its own post-conditions reject.
/// Always a bug; never caught by library code.
class InternalError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

} // namespace lrbisim

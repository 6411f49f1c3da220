// SPDX-License-Identifier: MIT
#ifndef FLOWLAT_ERROR_HPP
#define FLOWLAT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace flowlat {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Syntax error in a program, store, environment or lattice file.
/// Carries a 1-based line/column position.
class ParseError : public Error {
public:
  ParseError(std::string msg, int line, int col)
      : Error(format(msg, line, col)), line_(line), col_(col),
        message_(std::move(msg)) {}

  int line() const { return line_; }
  int col() const { return col_; }
  const std::string& message() const { return message_; }

private:
  static std::string format(const std::string& msg, int line, int col) {
    return std::to_string(line) + ":" + std::to_string(col) + ": " + msg;
  }
  int line_;
  int col_;
  std::string message_;
};

/// Violation of a lattice law or a malformed lattice description.
class LatticeError : public Error {
public:
  using Error::Error;
};

/// Ill-formed input to a typing or translation operation
/// (undeclared variable, unknown lattice element, domain mismatch).
class TypingError : public Error {
public:
  using Error::Error;
};

/// Runtime error during program execution (undeclared variable in a store).
class EvalError : public Error {
public:
  using Error::Error;
};

} // namespace flowlat

#endif

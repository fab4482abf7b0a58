#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace casp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Line and column are 1-based; column 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) +
              (column ? ":" + std::to_string(column) : std::string()) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A brute-force search or transformation refused because its size cap was exceeded.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace casp

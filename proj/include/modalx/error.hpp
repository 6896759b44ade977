#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace modalx {

/// Base class for every error raised by the library. The CLI maps these to
/// exit status 2 (input error).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line), message_(message) {}

  /// Same error located in a file: "<file>:<line>: <message>".
  ParseError(const std::string& file, const ParseError& inner)
      : Error(file + ":" + std::to_string(inner.line()) + ": " + inner.message()),
        line_(inner.line()),
        message_(inner.message()) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t line_;
  std::string message_;
};

}  // namespace modalx

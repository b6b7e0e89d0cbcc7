#pragma once

#include <stdexcept>
#include <string>

namespace streamscreen {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller passed an argument outside an operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed stream data: bad weights, NaN values, bad sparse indices.
class InputError : public Error {
 public:
  using Error::Error;
};

// A text record could not be parsed. Carries the 1-based line number.
class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Inconsistent screener settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The data cannot support the requested criterion (e.g. a single class).
class DegenerateScore : public Error {
 public:
  using Error::Error;
};

}  // namespace streamscreen

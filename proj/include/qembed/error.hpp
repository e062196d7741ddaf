#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qembed {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Iterative procedure ran out of iterations. Carries the last state so
/// callers can report how far off it was.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_value, double residual)
      : Error(what), last_value_(last_value), residual_(residual) {}
  double last_value() const noexcept { return last_value_; }
  double residual() const noexcept { return residual_; }

 private:
  double last_value_;
  double residual_;
};

/// All shots were discarded by post-selection.
class StarvationError : public Error {
 public:
  using Error::Error;
};

}  // namespace qembed

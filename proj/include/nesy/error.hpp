#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nesy {

/// Base class of every exception thrown by the library.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (DIMACS, DSL, NNF, weights, spec files).
/// `line()` is 1-based, 0 when no line applies.
class parse_error : public error {
public:
  parse_error(const std::string& what, std::size_t line = 0)
      : error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// A query or construction whose preconditions fail on well-formed input,
/// e.g. a zero-probability constraint or an unsmoothed circuit.
class computation_error : public error {
public:
  using error::error;
};

/// A configured cap (clause count, cache size, path count, time) was exceeded.
class limit_error : public computation_error {
public:
  using computation_error::computation_error;
};

}  // namespace nesy

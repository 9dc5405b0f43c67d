#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace piezonet {

// Invalid input: bad parameters, malformed text, violated invariants.
// The CLI maps it to exit code 1.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure: eigensolver breakdown, quadrature mismatch, divergence.
// The CLI maps it to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ParameterError tied to a line of some text input (netlist or config).
class LineError : public ParameterError {
 public:
  LineError(std::size_t line, const std::string& what)
      : ParameterError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace piezonet

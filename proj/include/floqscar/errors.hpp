#pragma once

#include <stdexcept>
#include <string>

namespace floqscar {

/// Invalid physical or numerical parameter (odd L, N out of range, ...).
class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed textual input (Fock labels, config values, graph documents).
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operands whose shapes do not match.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical precondition failed (non-unitary input, degenerate pair, ...).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace floqscar

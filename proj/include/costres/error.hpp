#pragma once

#include <stdexcept>
#include <string>

namespace costres {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (CSV rows, partition lines, config files).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A domain value violates one of its invariants.
class InvariantError : public Error {
public:
    using Error::Error;
};

/// Two inputs that must agree in shape (horizon, length, stage) do not.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// The LP/MILP solver could not produce an optimal answer.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Invalid run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace costres

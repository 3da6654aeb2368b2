#pragma once

#include <stdexcept>
#include <string>

namespace momexp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed user input: bad JSON, bad specifier, inconsistent shapes.
class InputError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public InputError {
public:
    using InputError::InputError;
};

/// An operation mixed incompatible scalar backends, or asked a
/// float-only sequence for exact values.
class BackendMismatch : public InputError {
public:
    using InputError::InputError;
};

class SequenceMismatch : public InputError {
public:
    using InputError::InputError;
};

/// A moment sequence violated m(0) = 1 or positivity, or a custom
/// sequence was asked for an index beyond its table.
class InvalidSequence : public InputError {
public:
    using InputError::InputError;
};

/// Numeric failures (exit status 3 in the CLI).
class NumericError : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public NumericError {
public:
    SingularMatrix() : NumericError("matrix is singular") {}
    using NumericError::NumericError;
};

class RootFindingFailed : public NumericError {
public:
    using NumericError::NumericError;
};

class ChainConstructionFailed : public NumericError {
public:
    using NumericError::NumericError;
};

} // namespace momexp

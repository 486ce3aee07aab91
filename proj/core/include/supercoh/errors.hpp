#pragma once

#include <stdexcept>
#include <string>

namespace supercoh {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid arguments / violated preconditions (CLI maps these to exit code 1).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Numerical / runtime failures (CLI maps these to exit code 2).
class NumericalError : public Error {
public:
    using Error::Error;
};

class EmptyGraphError : public NumericalError {
public:
    EmptyGraphError() : NumericalError("random graph has no edges; coupling normalization undefined") {}
};

class ConvergenceFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NumericalBlowup : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DiagonalizationFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DimensionCapError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NoTransitionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InsufficientDataError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NoIsolatedStateError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Network-spec grammar errors carry the offending position.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& what, std::size_t position)
        : ValidationError(what + " (at position " + std::to_string(position) + ")"),
          position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

}  // namespace supercoh

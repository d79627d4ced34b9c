#pragma once

#include <stdexcept>
#include <string>

namespace kinetikos {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A polynomial or configuration is degenerate for all time (e.g. an
/// identically-zero determinant).
class DegeneracyError : public Error {
public:
    using Error::Error;
};

/// An exhaustive enumeration would exceed its configured size guard.
class GuardExceeded : public Error {
public:
    using Error::Error;
};

/// A documented precondition on the inputs does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

/// Randomized construction failed verification on every attempt.
class AttemptsExhausted : public Error {
public:
    AttemptsExhausted(const std::string& what, double worst_violation) : Error(what), worst_violation_(worst_violation) {}

    /// Nets: size of the largest uncovered edge seen on the best attempt.
    /// Approximations: the smallest maximum deviation over all attempts.
    double worst_violation() const noexcept { return worst_violation_; }

private:
    double worst_violation_;
};

}  // namespace kinetikos

#pragma once

#include <stdexcept>
#include <string>

namespace markovgp {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Vector/matrix shapes do not line up.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// A matrix required to be positive semidefinite is not, beyond round-off tolerance.
class NotPSD : public Error {
public:
    using Error::Error;
};

/// The observation covariance cannot be factorized even after jitter escalation.
/// Typically signals duplicated sample locations with no regularizing noise.
class SingularConditioning : public Error {
public:
    using Error::Error;
};

/// A parameter violates its documented precondition.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// A location lies outside the process domain [0, inf).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A conditioning bracket is degenerate: the bracketing points are perfectly
/// correlated (or have zero variance) so the two-point weights are undefined.
class DegenerateBracket : public Error {
public:
    using Error::Error;
};

/// Malformed input text. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, long line = 0)
        : Error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

} // namespace markovgp

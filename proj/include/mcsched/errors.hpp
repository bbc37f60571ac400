#pragma once

#include <stdexcept>
#include <string>

namespace mcsched {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or scheduling parameters; the message names the violated bound.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed operands: wrong vector lengths, non-finite coefficients, unknown ids.
class InputError : public Error {
public:
    using Error::Error;
};

/// Value outside its mathematical domain (e.g. negative transmit power).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Lookup of an id that does not exist in the instance.
class LookupError : public Error {
public:
    using Error::Error;
};

/// File could not be parsed; message carries line/field diagnostics where available.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Filesystem-level failure (unreadable/unwritable path).
class IoError : public Error {
public:
    using Error::Error;
};

/// Enumeration would exceed the brute-force size guard.
class SizeError : public Error {
public:
    using Error::Error;
};

/// Operation not defined for the requested formulation kind.
class UnsupportedKindError : public Error {
public:
    using Error::Error;
};

/// Root relaxation (or the whole problem) admits no feasible point.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// The rounding pass could not fix a source feasibly in any mode; names the source.
class RoundingFailureError : public Error {
public:
    RoundingFailureError(int source, const std::string& what)
        : Error(what), source_(source) {}
    int source() const { return source_; }

private:
    int source_ = -1;
};

/// Solution decoding failed (e.g. a binary variable is fractional beyond tolerance).
class DecodeError : public Error {
public:
    using Error::Error;
};

/// An operation was called on a state that does not admit it (e.g. empty candidate set).
class StateError : public Error {
public:
    using Error::Error;
};

/// Internal solver iteration cap reached; indicates a numerical pathology.
class SolverStallError : public Error {
public:
    using Error::Error;
};

}  // namespace mcsched

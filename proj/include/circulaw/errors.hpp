#pragma once

#include <stdexcept>
#include <string>

namespace circulaw {

// Base of every error the library throws. The CLI maps the concrete type to
// an exit code, so keep the hierarchy flat.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid ensemble or experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// An operation was applied in a state that forbids it (double shift, ...).
class UsageError : public Error {
public:
    using Error::Error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Iterative kernel failed to converge or produced non-finite values.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A statistical estimate could not be formed (e.g. every trial excluded).
class EstimationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace circulaw

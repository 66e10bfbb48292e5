#pragma once

#include <stdexcept>
#include <string>

namespace imkit {

// Base of every error the library raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed configuration or invalid construction parameters.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Argument outside the domain an operation is defined on.
class DomainError : public Error {
public:
    using Error::Error;
};

// Numerical or fitting failure (degenerate data, non-convergence).
class NumericError : public Error {
public:
    using Error::Error;
};

// A structural precondition failed, e.g. a confidence family that is not nested.
class StructuralError : public Error {
public:
    using Error::Error;
};

}  // namespace imkit

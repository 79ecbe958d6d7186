#pragma once

#include <stdexcept>
#include <string>

namespace igaspec {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class UnsupportedOrderError : public Error {
public:
    using Error::Error;
};

class UnsupportedDegreeError : public Error {
public:
    using Error::Error;
};

/// Invalid or inconsistent configuration (mismatched degrees, bad flags, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A quadrature rule has too few points to integrate the basis products.
class InsufficientExactnessError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class IndexError : public Error {
public:
    using Error::Error;
};

/// Iterative computation failed to converge or produced an unusable result.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Cholesky factorization of the mass matrix hit a nonpositive pivot.
class DefinitenessError : public NumericError {
public:
    DefinitenessError(const std::string& what, std::size_t pivot)
        : NumericError(what + " (failing pivot index " + std::to_string(pivot) + ")"), pivot_(pivot)
    {
    }

    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

/// Materialization would exceed the configured size cap.
class ResourceError : public Error {
public:
    using Error::Error;
};

class InvalidSpectrumError : public Error {
public:
    using Error::Error;
};

} // namespace igaspec

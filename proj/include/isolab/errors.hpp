#pragma once

#include <stdexcept>
#include <string>

namespace isolab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (non-finite input, R > 0 branch, off-grid read).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Series or quadrature failed to reach its tolerance.
class PrecisionError : public Error {
public:
    PrecisionError(const std::string& what, double last_term)
        : Error(what), last_term_(last_term) {}
    double last_term() const noexcept { return last_term_; }

private:
    double last_term_;
};

/// Explicit time step broke the positivity floor or the invariant region.
class StabilityError : public Error {
public:
    using Error::Error;
};

/// Caller violated a documented precondition (e.g. non-convex entropy pair).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Root finding or other numerical procedure did not converge.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Configuration text could not be parsed or validated.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line) : Error(what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace isolab

#pragma once

#include <stdexcept>
#include <string>

namespace bandop {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed operator specification (JSON syntax or schema).
class ParseError : public Error {
public:
    using Error::Error;
};

/// The requested computation is not available for this symbol class or exponent.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// Block size or exponent of two operands disagree.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// A dense kernel or a limit process did not converge.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, double sigma_min)
        : Error(what), sigma_min_(sigma_min) {}
    double sigma_min() const noexcept { return sigma_min_; }

private:
    double sigma_min_;
};

/// A documented precondition of an operation is violated by its input.
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace bandop

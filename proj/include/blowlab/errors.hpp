#pragma once

#include <stdexcept>
#include <string>

namespace blowlab {

enum class ErrorKind {
    Input,
    Domain,
    Config,
    Admissibility,
    Quadrature,
    NoFiniteBound,
    DomainTooSmall,
    InsufficientHorizon,
    OutOfTheorem,
    Numerical,
    Io,
};

/// Base exception for every failure raised by the library. The kind drives
/// the CLI exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised when adaptive quadrature cannot reach its tolerance; carries the
/// best estimate that was achieved.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double estimate, double error)
        : Error(ErrorKind::Quadrature, what), estimate_(estimate), error_(error) {}

    double estimate() const noexcept { return estimate_; }
    double error_estimate() const noexcept { return error_; }

private:
    double estimate_;
    double error_;
};

const char* to_string(ErrorKind kind);

/// CLI exit codes: 0 success, 2 config error, 3 admissibility error,
/// 4 numerical failure.
int exit_code(ErrorKind kind);

}  // namespace blowlab

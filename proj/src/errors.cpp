#include "blowlab/errors.hpp"

namespace blowlab {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Input: return "input";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Config: return "config";
        case ErrorKind::Admissibility: return "admissibility";
        case ErrorKind::Quadrature: return "quadrature";
        case ErrorKind::NoFiniteBound: return "no-finite-bound";
        case ErrorKind::DomainTooSmall: return "domain-too-small";
        case ErrorKind::InsufficientHorizon: return "insufficient-horizon";
        case ErrorKind::OutOfTheorem: return "out-of-theorem";
        case ErrorKind::Numerical: return "numerical";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config:
        case ErrorKind::Input:
        case ErrorKind::Io:
            return 2;
        case ErrorKind::Admissibility:
            return 3;
        default:
            return 4;
    }
}

}  // namespace blowlab

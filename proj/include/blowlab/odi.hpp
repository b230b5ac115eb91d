#pragma once

#include <span>
#include <string>
#include <vector>

namespace blowlab::odi {

/// Data of the R-indexed criterion
///   delta + A(R) <= C0 R^{-theta/p'} (log R)^{kappa/p'} A*(R)^{1/p},  R in [R1, T).
struct ODIParams {
    double delta = 1.0;
    double C0 = 1.0;
    double R1 = 2.718281828459045;
    double theta = 0.0;
    double kappa = 0.0;
    double p = 2.0;

    void validate() const;
};

enum class BoundCase { Algebraic, SingleExp, DoubleExp };

const char* to_string(BoundCase c);

/// Upper bound for T. T itself overflows double quickly in the exponential
/// cases, so the bound is carried as log T and log log T.
struct ODIBound {
    double T_upper = 0.0;  ///< exp(log_T), +inf past double range
    double log_T = 0.0;
    double log_log_T = 0.0;
    double budget = 0.0;   ///< (p-1)^-1 log 2 C0^p delta^{-(p-1)}
    BoundCase case_tag = BoundCase::Algebraic;
    std::string symbolic;  ///< printable form, e.g. "exp(exp(6.93147))"

    bool finite() const;
    bool operator==(const ODIBound&) const = default;
};

BoundCase classify(const ODIParams& params);

/// rho_T = int_{log R1}^{log T} e^{theta (p-1) s} s^{-kappa (p-1)} ds.
double rho_of_T(const ODIParams& params, double T);
double rho_of_log_T(const ODIParams& params, double log_T);

/// Budget on the right side of rho_T <= (p-1)^-1 log 2 C0^p delta^{-(p-1)}.
double budget(const ODIParams& params);

/// Solves rho_T = budget for T by bracketed bisection/secant iteration on
/// log T (or log log T when theta = 0).
ODIBound lifespan_bound_numeric(const ODIParams& params);

/// Closed-form bound with a constant calibrated so it dominates the numeric
/// inversion on a log-spaced delta grid in [delta_lo, delta0]:
///   Algebraic: T <= C delta^{-1/theta} (log 1/delta)^{kappa/theta}
///   SingleExp: T <= exp(C delta^{-(p-1)/(1-kappa(p-1))})
///   DoubleExp: T <= exp(exp(C delta^{-(p-1)}))
struct ClosedForm {
    BoundCase case_tag = BoundCase::Algebraic;
    double C = 0.0;  ///< log C in the algebraic case
    double delta_exponent = 0.0;
    double log_exponent = 0.0;
    double delta0 = 0.1;

    ODIBound evaluate(double delta) const;
    std::string shape() const;
};

ClosedForm calibrate_closed_form(const ODIParams& params, double delta0 = 0.1, double delta_lo = 1e-6,
                                 std::size_t grid = 160);

/// Calibrates and evaluates at params.delta; requires delta < delta0.
ODIBound lifespan_bound_closed_form(const ODIParams& params, double delta0 = 0.1);

struct FunctionalSample {
    double R = 0.0;
    double A = 0.0;       ///< iint w psi_R
    double A_star = 0.0;  ///< iint w psi*_R
};

struct CriterionRow {
    double R = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;  ///< rhs - lhs
    bool ok = false;
};

struct CriterionReport {
    std::vector<CriterionRow> rows;
    bool passed = false;
    double min_C0 = 0.0;  ///< smallest C0 for which every row holds
};

CriterionReport verify_criterion(std::span<const FunctionalSample> samples, const ODIParams& params);

}  // namespace blowlab::odi

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "blowlab/model.hpp"

namespace blowlab::quad {

/// Adaptive Gauss-Kronrod (15 point) on [a, b], split at the given interior
/// breakpoints. Throws QuadratureError when a piece misses both rel_tol and
/// abs_tol.
double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10,
                 std::span<const double> breaks = {}, double abs_tol = 0.0);

std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f, double a,
                                       double b, double rel_tol = 1e-10, std::span<const double> breaks = {},
                                       double abs_tol = 0.0);

/// Integrand over the parabolic region
/// P(R) = {(r, t) : r >= 1, t >= 0, (r - 1)^2 + t <= R}.
struct PRIntegrand {
    std::function<double(double r, double t)> f;
    /// Optional: interior points in t (for fixed r) where f is not smooth.
    std::function<void(double r, double R, std::vector<double>& out)> t_breaks;
    /// Optional: interior points in r where the inner integral is not smooth.
    std::vector<double> r_breaks;
};

/// int_1^{1+sqrt R} int_0^{R-(r-1)^2} f(r, t) dt |S^{N-1}| r^{N-1} dr by nested
/// adaptive quadrature (inner t, outer r). Inner integrals negligible against
/// tol times the integrand's scale are not refined to full relative accuracy.
double integrate_PR(const PRIntegrand& f, double R, double tol = 1e-8, const WeightMode& mode = WeightMode::log2d());

/// iint_{P(R)} Phi dx dt.
double phi_mass(double R, const WeightMode& mode = WeightMode::log2d(), double tol = 1e-10);

/// Closed-form upper bound of phi_mass: pi R (sqrt R + 1)^2 log(sqrt R + 1) in
/// two dimensions, R |S^{N-1}| (sqrt R + 1)^N / N for the power weight.
double phi_mass_bound(double R, const WeightMode& mode = WeightMode::log2d());

/// Space-time samples on a uniform radial grid: one row of nodal values per
/// stored time level.
struct SampledField {
    std::span<const double> times;
    double r0 = 1.0;
    double h = 0.0;
    std::size_t n = 0;
    std::function<std::span<const double>(std::size_t level)> row;
};

/// iint_{P(R)} g(r, t) * weight(r, t) dx dt where g is the sampled field.
/// In r, g is interpolated linearly between nodes and each cell (split at
/// r_breaks(t) and at the edge of P(R)) is integrated with 3-point
/// Gauss-Legendre against the weight; in t the level integrals are combined
/// with the trapezoid rule, closing with the degenerate level t = R. Levels
/// beyond min(R, last time) are ignored.
double integrate_PR_sampled(const SampledField& field, const std::function<double(double r, double t)>& weight,
                            const std::function<void(double t, std::vector<double>& out)>& r_breaks, double R,
                            const WeightMode& mode = WeightMode::log2d());

}  // namespace blowlab::quad

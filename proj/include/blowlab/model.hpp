#pragma once

#include <complex>
#include <utility>
#include <vector>

namespace blowlab {

using cplx = std::complex<double>;

enum class WeightKind { Log2D, PowerND };

/// Harmonic Dirichlet weight: log r in two dimensions, 1 - r^(2-N) for
/// N >= 3. Also fixes the spatial dimension used by the radial Laplacian
/// and the measure dx = |S^{N-1}| r^{N-1} dr.
struct WeightMode {
    WeightKind kind = WeightKind::Log2D;
    int dim = 2;

    static WeightMode log2d() { return {WeightKind::Log2D, 2}; }
    static WeightMode power(int n) { return {WeightKind::PowerND, n}; }

    double phi(double r) const;
    double phi_prime(double r) const;
    double phi_second(double r) const;

    /// |S^{N-1}|, 2*pi for N = 2.
    double sphere_area() const;

    /// |S^{N-1}| r^{N-1}
    double measure(double r) const;

    void validate() const;
    bool operator==(const WeightMode&) const = default;
};

struct ModelParams {
    int tau = 0;
    double zeta = 0.0;
    cplx lambda{1.0, 0.0};
    double p = 2.0;
    double epsilon = 1.0;
    WeightMode weight{};

    /// Throws Error(Input) on any violated invariant. The linear problem
    /// (lambda = 0) is admitted by the solver only.
    void validate(bool require_lambda = true) const;

    double p_conj() const { return p / (p - 1.0); }
    int dim() const { return weight.dim; }
};

enum class ProfileKind { Zero, Bump, Annulus, GaussianRing, Indicator, Constant, Table };

/// Radial profile on r >= 1. Shape parameters depend on the kind:
///  - Bump:         (4 (r-a)(b-r) / (b-a)^2)^3 on [a, b], C^2 at the ends.
///  - Annulus:      1 on [a+w, b-w] with quintic smoothstep ramps of width w.
///  - GaussianRing: exp(-((r-c)/sigma)^2) times the annulus window on [a, b].
///  - Indicator:    1 on [a, b]; discontinuous, intended for moment checks.
///  - Constant:     1 on (1, inf); only meaningful with diffusion disabled.
///  - Table:        piecewise-linear through (r_i, v_i), zero outside.
struct RadialProfile {
    ProfileKind kind = ProfileKind::Zero;
    cplx amplitude{1.0, 0.0};
    double r_lo = 1.0;
    double r_hi = 1.0;
    double ramp = 0.0;
    double center = 0.0;
    double sigma = 1.0;
    std::vector<double> table_r;
    std::vector<cplx> table_v;

    static RadialProfile zero() { return {}; }
    static RadialProfile bump(double a, double b, cplx amp = 1.0);
    static RadialProfile annulus(double a, double b, double ramp, cplx amp = 1.0);
    static RadialProfile gaussian_ring(double a, double b, double center, double sigma, cplx amp = 1.0);
    static RadialProfile indicator(double a, double b, cplx amp = 1.0);
    static RadialProfile constant(cplx amp = 1.0);
    static RadialProfile table(std::vector<double> r, std::vector<cplx> v);

    cplx operator()(double r) const;

    bool is_zero() const { return kind == ProfileKind::Zero; }
    bool compact() const { return kind != ProfileKind::Constant; }

    /// Closed support hull [lo, hi]; hi is +inf for Constant.
    std::pair<double, double> support() const;

    /// Points where the profile is not smooth (quadrature breakpoints).
    std::vector<double> breakpoints() const;

    void validate() const;
};

struct InitialData {
    RadialProfile f;
    RadialProfile g;

    /// Hull of the supports of f and g (g ignored when zero).
    std::pair<double, double> support() const;

    InitialData scaled(double s) const;
    void validate() const;
};

struct AngleCertificate {
    double xi0 = 0.0;
    double c0 = 0.0;
    cplx moment{};
};

/// I = |S^{N-1}| * int_1^inf (tau g + e^{i zeta} f) W(r) r^{N-1} dr.
cplx initial_moment(const InitialData& data, const ModelParams& params, double rel_tol = 1e-10);

/// False iff I lies on the ray {-rho * lambda : rho >= 0}.
bool check_admissible(cplx moment, cplx lambda, double angle_tol = 1e-9);

/// xi0 = clamp(-arg(I / lambda), -pi/2 + margin, pi/2 - margin) and
/// c0 = |I / lambda| cos(xi0 + arg(I / lambda)).
AngleCertificate choose_angle(cplx moment, cplx lambda, double margin = 0.1, double angle_tol = 1e-9);

}  // namespace blowlab

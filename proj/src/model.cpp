#include "blowlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "blowlab/errors.hpp"
#include "blowlab/quadrature.hpp"

namespace blowlab {
namespace {

constexpr double kPi = std::numbers::pi;

double smoothstep5(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

double annulus_window(double r, double a, double b, double w) {
    if (r <= a || r >= b) return 0.0;
    if (w <= 0.0) return 1.0;
    return smoothstep5((r - a) / w) * smoothstep5((b - r) / w);
}

// Wrap an angle into (-pi, pi].
double wrap(double a) {
    a = std::remainder(a, 2.0 * kPi);
    return a <= -kPi ? a + 2.0 * kPi : a;
}

}  // namespace

double WeightMode::phi(double r) const {
    if (kind == WeightKind::Log2D) return std::log(r);
    return 1.0 - std::pow(r, 2.0 - dim);
}

double WeightMode::phi_prime(double r) const {
    if (kind == WeightKind::Log2D) return 1.0 / r;
    return (dim - 2.0) * std::pow(r, 1.0 - dim);
}

double WeightMode::phi_second(double r) const {
    if (kind == WeightKind::Log2D) return -1.0 / (r * r);
    return (dim - 2.0) * (1.0 - dim) * std::pow(r, -static_cast<double>(dim));
}

double WeightMode::sphere_area() const {
    const double n = dim;
    return 2.0 * std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0);
}

double WeightMode::measure(double r) const {
    return sphere_area() * std::pow(r, dim - 1.0);
}

void WeightMode::validate() const {
    if (kind == WeightKind::Log2D && dim != 2) {
        throw Error(ErrorKind::Input, "log weight requires dimension 2");
    }
    if (kind == WeightKind::PowerND && dim < 3) {
        throw Error(ErrorKind::Input, "power weight requires dimension N >= 3");
    }
}

void ModelParams::validate(bool require_lambda) const {
    if (tau != 0 && tau != 1) throw Error(ErrorKind::Input, "tau must be 0 or 1");
    if (!(std::abs(zeta) <= kPi / 2.0 + 1e-15)) throw Error(ErrorKind::Input, "|zeta| must not exceed pi/2");
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) {
        throw Error(ErrorKind::Input, "lambda must be finite");
    }
    if (require_lambda && lambda == cplx{0.0, 0.0}) throw Error(ErrorKind::Input, "lambda must be nonzero");
    if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorKind::Input, "p must exceed 1");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw Error(ErrorKind::Input, "epsilon must be positive");
    weight.validate();
}

RadialProfile RadialProfile::bump(double a, double b, cplx amp) {
    RadialProfile pr;
    pr.kind = ProfileKind::Bump;
    pr.r_lo = a;
    pr.r_hi = b;
    pr.amplitude = amp;
    return pr;
}

RadialProfile RadialProfile::annulus(double a, double b, double ramp, cplx amp) {
    RadialProfile pr;
    pr.kind = ProfileKind::Annulus;
    pr.r_lo = a;
    pr.r_hi = b;
    pr.ramp = ramp;
    pr.amplitude = amp;
    return pr;
}

RadialProfile RadialProfile::gaussian_ring(double a, double b, double center, double sigma, cplx amp) {
    RadialProfile pr;
    pr.kind = ProfileKind::GaussianRing;
    pr.r_lo = a;
    pr.r_hi = b;
    pr.center = center;
    pr.sigma = sigma;
    pr.ramp = (b - a) / 4.0;
    pr.amplitude = amp;
    return pr;
}

RadialProfile RadialProfile::indicator(double a, double b, cplx amp) {
    RadialProfile pr;
    pr.kind = ProfileKind::Indicator;
    pr.r_lo = a;
    pr.r_hi = b;
    pr.amplitude = amp;
    return pr;
}

RadialProfile RadialProfile::constant(cplx amp) {
    RadialProfile pr;
    pr.kind = ProfileKind::Constant;
    pr.r_lo = 1.0;
    pr.r_hi = std::numeric_limits<double>::infinity();
    pr.amplitude = amp;
    return pr;
}

RadialProfile RadialProfile::table(std::vector<double> r, std::vector<cplx> v) {
    RadialProfile pr;
    pr.kind = ProfileKind::Table;
    if (!r.empty()) {
        pr.r_lo = r.front();
        pr.r_hi = r.back();
    }
    pr.table_r = std::move(r);
    pr.table_v = std::move(v);
    return pr;
}

cplx RadialProfile::operator()(double r) const {
    switch (kind) {
        case ProfileKind::Zero:
            return 0.0;
        case ProfileKind::Bump: {
            if (r <= r_lo || r >= r_hi) return 0.0;
            const double w = r_hi - r_lo;
            const double q = 4.0 * (r - r_lo) * (r_hi - r) / (w * w);
            return amplitude * (q * q * q);
        }
        case ProfileKind::Annulus:
            return amplitude * annulus_window(r, r_lo, r_hi, ramp);
        case ProfileKind::GaussianRing: {
            const double z = (r - center) / sigma;
            return amplitude * (std::exp(-z * z) * annulus_window(r, r_lo, r_hi, ramp));
        }
        case ProfileKind::Indicator:
            return (r >= r_lo && r <= r_hi) ? amplitude : cplx{};
        case ProfileKind::Constant:
            return r > 1.0 ? amplitude : cplx{};
        case ProfileKind::Table: {
            if (table_r.empty() || r < table_r.front() || r > table_r.back()) return 0.0;
            const auto it = std::upper_bound(table_r.begin(), table_r.end(), r);
            if (it == table_r.end()) return table_v.back();
            const auto j = static_cast<std::size_t>(it - table_r.begin());
            const double x0 = table_r[j - 1];
            const double x1 = table_r[j];
            const double th = (r - x0) / (x1 - x0);
            return table_v[j - 1] * (1.0 - th) + table_v[j] * th;
        }
    }
    return 0.0;
}

std::pair<double, double> RadialProfile::support() const {
    if (kind == ProfileKind::Zero) return {1.0, 1.0};
    return {r_lo, r_hi};
}

std::vector<double> RadialProfile::breakpoints() const {
    switch (kind) {
        case ProfileKind::Annulus:
        case ProfileKind::GaussianRing:
            return {r_lo + ramp, r_hi - ramp};
        case ProfileKind::Table:
            return table_r;
        default:
            return {};
    }
}

void RadialProfile::validate() const {
    switch (kind) {
        case ProfileKind::Zero:
        case ProfileKind::Constant:
            break;
        case ProfileKind::Table:
            if (table_r.size() < 2 || table_r.size() != table_v.size()) {
                throw Error(ErrorKind::Input, "tabulated profile needs >= 2 matching samples");
            }
            if (!std::is_sorted(table_r.begin(), table_r.end()) ||
                std::adjacent_find(table_r.begin(), table_r.end()) != table_r.end()) {
                throw Error(ErrorKind::Input, "tabulated radii must be strictly increasing");
            }
            if (table_r.front() < 1.0) throw Error(ErrorKind::Input, "tabulated profile extends inside r < 1");
            if (table_r.front() == 1.0 && std::abs(table_v.front()) != 0.0) {
                throw Error(ErrorKind::Input, "tabulated profile must vanish at r = 1");
            }
            break;
        default:
            if (!(r_lo > 1.0) || !(r_hi > r_lo) || !std::isfinite(r_hi)) {
                throw Error(ErrorKind::Input, "profile support must be an interval inside (1, inf)");
            }
            if (kind == ProfileKind::Annulus && !(ramp > 0.0 && 2.0 * ramp <= r_hi - r_lo)) {
                throw Error(ErrorKind::Input, "annulus ramp must lie in (0, (b-a)/2]");
            }
            if (kind == ProfileKind::GaussianRing && !(sigma > 0.0)) {
                throw Error(ErrorKind::Input, "gaussian ring width must be positive");
            }
    }
    if (!std::isfinite(amplitude.real()) || !std::isfinite(amplitude.imag())) {
        throw Error(ErrorKind::Input, "profile amplitude must be finite");
    }
}

std::pair<double, double> InitialData::support() const {
    if (f.is_zero() && g.is_zero()) return {1.0, 1.0};
    if (g.is_zero()) return f.support();
    if (f.is_zero()) return g.support();
    const auto [a0, b0] = f.support();
    const auto [a1, b1] = g.support();
    return {std::min(a0, a1), std::max(b0, b1)};
}

InitialData InitialData::scaled(double s) const {
    InitialData out = *this;
    out.f.amplitude *= s;
    out.g.amplitude *= s;
    for (auto& v : out.f.table_v) v *= s;
    for (auto& v : out.g.table_v) v *= s;
    return out;
}

void InitialData::validate() const {
    f.validate();
    g.validate();
    if (std::abs(f(1.0)) != 0.0 || std::abs(g(1.0)) != 0.0) {
        throw Error(ErrorKind::Input, "initial data must vanish at r = 1");
    }
}

cplx initial_moment(const InitialData& data, const ModelParams& params, double rel_tol) {
    params.validate();
    data.validate();
    const bool use_g = params.tau == 1 && !data.g.is_zero();
    if (data.f.is_zero() && !use_g) return 0.0;
    if (!data.f.compact() || (use_g && !data.g.compact())) {
        throw Error(ErrorKind::Input, "initial moment needs compactly supported data");
    }
    auto [lo, hi] = data.f.is_zero() ? data.g.support() : data.f.support();
    if (use_g && !data.f.is_zero()) {
        const auto [glo, ghi] = data.g.support();
        lo = std::min(lo, glo);
        hi = std::max(hi, ghi);
    }
    std::vector<double> breaks = data.f.breakpoints();
    if (use_g) {
        const auto gb = data.g.breakpoints();
        breaks.insert(breaks.end(), gb.begin(), gb.end());
        const auto [a0, b0] = data.f.support();
        const auto [a1, b1] = data.g.support();
        breaks.insert(breaks.end(), {a0, b0, a1, b1});
    }
    const cplx rot = std::polar(1.0, params.zeta);
    const WeightMode& w = params.weight;
    auto integrand = [&](double r) -> cplx {
        cplx v = rot * data.f(r);
        if (use_g) v += data.g(r);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw Error(ErrorKind::Input, "non-finite initial profile value at r = " + std::to_string(r));
        }
        return v * (w.phi(r) * std::pow(r, w.dim - 1.0));
    };
    return w.sphere_area() * quad::integrate_complex(integrand, lo, hi, rel_tol, breaks);
}

bool check_admissible(cplx moment, cplx lambda, double angle_tol) {
    if (lambda == cplx{0.0, 0.0}) throw Error(ErrorKind::Input, "lambda must be nonzero");
    if (std::abs(moment) == 0.0) return false;
    const double gap = wrap(std::arg(moment) - std::arg(-lambda));
    return std::abs(gap) >= angle_tol;
}

AngleCertificate choose_angle(cplx moment, cplx lambda, double margin, double angle_tol) {
    if (!(margin > 0.0 && margin < kPi / 4.0)) throw Error(ErrorKind::Input, "angle margin must lie in (0, pi/4)");
    if (!check_admissible(moment, lambda, angle_tol)) {
        throw Error(ErrorKind::Admissibility,
                    "data moment lies on the ray {-rho*lambda}: blow-up hypothesis violated");
    }
    const cplx z = moment / lambda;
    const double phi = std::arg(z);
    AngleCertificate cert;
    cert.moment = moment;
    cert.xi0 = std::clamp(-phi, -kPi / 2.0 + margin, kPi / 2.0 - margin) + 0.0;
    cert.c0 = std::abs(z) * std::cos(cert.xi0 + phi);
    if (!(cert.c0 > 0.0)) {
        throw Error(ErrorKind::Admissibility, "degenerate admissibility: projected moment c0 <= 0 after clamping xi0");
    }
    return cert;
}

}  // namespace blowlab

#include "blowlab/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "blowlab/errors.hpp"
#include "blowlab/quadrature.hpp"

namespace blowlab {
namespace {

// 1 - q(x) = (1 - x)^3 (1 + 3x + 6x^2), free of cancellation near x = 1.
double one_minus_q0(double x) {
    const double y = 1.0 - x;
    return y * y * y * (1.0 + 3.0 * x + 6.0 * x * x);
}
double q1(double x) { return 30.0 * x * x * (1.0 - x) * (1.0 - x); }
double q2(double x) { return 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x); }

}  // namespace

CutoffSpec::CutoffSpec(double p, int dim) : p_(p), power_(2.0 * p / (p - 1.0)), dim_(dim) {
    if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorKind::Input, "cutoff exponent needs p > 1");
    if (dim < 1) throw Error(ErrorKind::Input, "cutoff dimension must be positive");
}

double CutoffSpec::eta(double s) {
    if (s <= 0.5) return 1.0;
    if (s >= 1.0) return 0.0;
    return one_minus_q0(2.0 * s - 1.0);
}

double CutoffSpec::eta_d1(double s) {
    if (s <= 0.5 || s >= 1.0) return 0.0;
    return -2.0 * q1(2.0 * s - 1.0);
}

double CutoffSpec::eta_d2(double s) {
    if (s <= 0.5 || s >= 1.0) return 0.0;
    return -4.0 * q2(2.0 * s - 1.0);
}

double CutoffSpec::eta_star(double s) { return s < 0.5 ? 0.0 : eta(s); }

double CutoffSpec::psi_s(double s) const {
    const double e = eta(s);
    return e > 0.0 ? std::pow(e, power_) : 0.0;
}

double CutoffSpec::psi_s_d1(double s) const {
    const double e = eta(s);
    if (!(e > 0.0)) return 0.0;
    return power_ * std::pow(e, power_ - 1.0) * eta_d1(s);
}

double CutoffSpec::psi_s_d2(double s) const {
    const double e = eta(s);
    if (!(e > 0.0)) return 0.0;
    const double d1 = eta_d1(s);
    return power_ * (power_ - 1.0) * std::pow(e, power_ - 2.0) * d1 * d1 + power_ * std::pow(e, power_ - 1.0) * eta_d2(s);
}

double CutoffSpec::psi_star_s(double s) const {
    const double e = eta_star(s);
    return e > 0.0 ? std::pow(e, power_) : 0.0;
}

double ParabolicRegion::r_max() const { return 1.0 + std::sqrt(R); }

PsiJet psi_jet(const CutoffSpec& spec, double R, double r, double t) {
    if (!(R > 0.0)) throw Error(ErrorKind::Domain, "cutoff scale R must be positive");
    if (r < 1.0 || t < 0.0) throw Error(ErrorKind::Domain, "cutoff evaluated outside r >= 1, t >= 0");
    PsiJet j;
    const double s = s_of(R, r, t);
    if (s >= 1.0) return j;
    j.psi = spec.psi_s(s);
    j.psi_star = spec.psi_star_s(s);
    if (s <= 0.5) return j;
    const double d1 = spec.psi_s_d1(s);
    const double d2 = spec.psi_s_d2(s);
    const double sr = 2.0 * (r - 1.0) / R;
    j.dt = d1 / R;
    j.dtt = d2 / (R * R);
    j.dr = d1 * sr;
    // d_rr s = 2/R, so Lap s = (2/R)(1 + (dim - 1)(r - 1)/r).
    j.lap = d2 * sr * sr + d1 * (2.0 / R) * (1.0 + (spec.dim() - 1.0) * (r - 1.0) / r);
    return j;
}

double psi_eval(const CutoffSpec& spec, double R, double r, double t, PsiQuantity what) {
    const PsiJet j = psi_jet(spec, R, r, t);
    switch (what) {
        case PsiQuantity::Psi: return j.psi;
        case PsiQuantity::PsiStar: return j.psi_star;
        case PsiQuantity::Dt: return j.dt;
        case PsiQuantity::Dtt: return j.dtt;
        case PsiQuantity::Dr: return j.dr;
        case PsiQuantity::Lap: return j.lap;
    }
    return 0.0;
}

BoundRatios bound_ratios(const CutoffSpec& spec, double R, double r, double t, const WeightMode& weight) {
    const PsiJet j = psi_jet(spec, R, r, t);
    BoundRatios out;
    const bool any = j.dt != 0.0 || j.dtt != 0.0 || j.dr != 0.0 || j.lap != 0.0;
    if (!any) return out;
    if (!(j.psi_star > 0.0)) {
        throw Error(ErrorKind::Numerical, "cutoff derivative nonzero where psi* vanishes");
    }
    const double root = std::pow(j.psi_star, 1.0 / spec.p());
    out.dt = std::abs(j.dt) * R / root;
    out.dtt = std::abs(j.dtt) * R * R / root;
    out.lap = std::abs(j.lap) * R / root;
    if (r > 1.0) {
        out.dr = std::abs(j.dr) * R / (r * std::log(r) * root);
        out.consumed = std::abs(weight.phi_prime(r) * j.dr) * R / (weight.phi(r) * root);
    }
    return out;
}

LemmaConstants estimate_constants(const CutoffSpec& spec, std::span<const double> R_list,
                                  std::size_t samples_per_region, std::uint64_t seed, const WeightMode& weight,
                                  double safety) {
    if (R_list.empty()) throw Error(ErrorKind::Input, "constant estimation needs at least one R");
    if (samples_per_region < 1000) throw Error(ErrorKind::Input, "constant estimation needs >= 1000 samples per region");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    BoundRatios sup;
    for (double R : R_list) {
        if (!(R >= 1.0)) throw Error(ErrorKind::Input, "constant estimation needs R >= 1");
        const double rho_top = std::sqrt(R);
        for (std::size_t k = 0; k < samples_per_region; ++k) {
            const double u1 = unif(rng);
            const double u2 = unif(rng);
            const double rho = kBoundaryBand + (rho_top - kBoundaryBand) * u1 * u1;
            const double t = (R - rho * rho) * u2;
            const BoundRatios b = bound_ratios(spec, R, 1.0 + rho, std::max(t, 0.0), weight);
            sup.dt = std::max(sup.dt, b.dt);
            sup.dtt = std::max(sup.dtt, b.dtt);
            sup.dr = std::max(sup.dr, b.dr);
            sup.lap = std::max(sup.lap, b.lap);
            sup.consumed = std::max(sup.consumed, b.consumed);
        }
    }
    LemmaConstants c;
    c.C1 = safety * sup.dt;
    c.C2 = safety * sup.dtt;
    c.C3 = safety * sup.dr;
    c.C4 = safety * sup.lap;
    c.C3_consumed = safety * sup.consumed;
    c.safety = safety;
    c.samples = samples_per_region * R_list.size();
    return c;
}

double layer_integral(const CutoffSpec& spec, double s) {
    if (s < 0.0) throw Error(ErrorKind::Domain, "layer integral needs s >= 0");
    const double lo = std::max(s, 0.5);
    if (lo >= 1.0) return 0.0;
    return quad::integrate([&spec](double x) { return spec.psi_s(x) / x; }, lo, 1.0, 1e-12);
}

}  // namespace blowlab

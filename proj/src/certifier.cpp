#include "blowlab/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "blowlab/errors.hpp"
#include "blowlab/kernels.hpp"
#include "blowlab/quadrature.hpp"

namespace blowlab {
namespace {

enum class RowKind { AbsPow, Real, Imag };

// Integrates one nodal transform of the stored snapshots against a weight.
class SnapshotIntegrator {
public:
    SnapshotIntegrator(const Trajectory& traj, const WeightMode& mode) : traj_(traj), mode_(mode) {
        times_.reserve(traj.snapshots.size());
        for (const auto& s : traj.snapshots) times_.push_back(s.t);
        buffer_.resize(traj.grid.n);
    }

    double integrate(RowKind kind, double p, const std::function<double(double, double)>& weight,
                     const std::function<void(double, std::vector<double>&)>& breaks, double R) {
        quad::SampledField field;
        field.times = times_;
        field.r0 = 1.0;
        field.h = traj_.grid.h();
        field.n = traj_.grid.n;
        field.row = [&, kind, p](std::size_t lev) -> std::span<const double> {
            const auto& u = traj_.snapshots[lev].u;
            switch (kind) {
                case RowKind::AbsPow:
                    kernels::active().abs_pow(u, p, buffer_);
                    break;
                case RowKind::Real:
                    for (std::size_t i = 0; i < u.size(); ++i) buffer_[i] = u[i].real();
                    break;
                case RowKind::Imag:
                    for (std::size_t i = 0; i < u.size(); ++i) buffer_[i] = u[i].imag();
                    break;
            }
            return buffer_;
        };
        return quad::integrate_PR_sampled(field, weight, breaks, R, mode_);
    }

private:
    const Trajectory& traj_;
    WeightMode mode_;
    std::vector<double> times_;
    std::vector<double> buffer_;
};

void require_horizon(const Trajectory& traj, double R) {
    if (traj.snapshots.empty()) throw Error(ErrorKind::Input, "trajectory carries no snapshots");
    const bool blew_up = traj.stop == StopReason::Threshold || traj.stop == StopReason::AbortNorm;
    if (traj.t_final < R && !blew_up) {
        throw Error(ErrorKind::InsufficientHorizon, "trajectory ends at t = " + std::to_string(traj.t_final) +
                                                        " before R = " + std::to_string(R));
    }
}

void psi_breaks(double R, double t, std::vector<double>& out) {
    if (t < 0.5 * R) out.push_back(1.0 + std::sqrt(0.5 * R - t));
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

}  // namespace

CertificateReport certify(const ModelParams& params, const InitialData& data, const CertifierOptions& opts) {
    params.validate();
    data.validate();
    const WeightMode& mode = params.weight;
    const double p = params.p;
    if (mode.kind == WeightKind::Log2D && p > 2.0) {
        throw Error(ErrorKind::OutOfTheorem, "p > 2: small global solutions exist, no lifespan bound applies");
    }
    if (mode.kind == WeightKind::PowerND && p > 1.0 + 2.0 / mode.dim) {
        throw Error(ErrorKind::OutOfTheorem, "p above the Fujita exponent 1 + 2/N: no lifespan bound applies");
    }

    CertificateReport rep;
    rep.params = params;
    const cplx moment = initial_moment(data, params);
    rep.angle = choose_angle(moment, params.lambda, opts.margin, opts.angle_tol);

    const double r_hi = data.support().second;
    rep.R0 = std::max(opts.R0, 2.0 * (r_hi - 1.0) * (r_hi - 1.0));
    if (!(rep.R0 > 1.0)) throw Error(ErrorKind::Config, "R0 must exceed 1");

    const CutoffSpec spec(p, mode.dim);
    rep.constants = estimate_constants(spec, opts.constant_R_list, opts.samples, opts.seed, mode, opts.constant_safety);
    const auto& c = rep.constants;
    const double c3 = mode.kind == WeightKind::Log2D ? c.C3 : c.C3_consumed;
    rep.C5 = 2.0 * c3 + c.C4 + params.tau * c.C2 / rep.R0 + c.C1;

    if (mode.kind == WeightKind::Log2D) {
        rep.theta = (2.0 - p) / (p - 1.0);
        rep.kappa = 1.0;
    } else {
        rep.theta = 1.0 / (p - 1.0) - 0.5 * mode.dim;
        rep.kappa = 0.0;
    }
    if (std::abs(rep.theta) < 1e-12) rep.theta = 0.0;

    // sup over R >= R0 of phi_mass_bound(R)^{1/p'} R^-1 / (R^{-theta/p'} (log R)^{kappa/p'})
    const double pc = params.p_conj();
    double sup = 0.0;
    const std::size_t npts = std::max<std::size_t>(opts.sup_points, 2);
    for (std::size_t i = 0; i < npts; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(npts - 1);
        const double R = std::exp(std::log(rep.R0) + f * (std::log(opts.sup_R_max) - std::log(rep.R0)));
        const double ratio = std::pow(quad::phi_mass_bound(R, mode), 1.0 / pc) / R /
                             (std::pow(R, -rep.theta / pc) * std::pow(std::log(R), rep.kappa / pc));
        sup = std::max(sup, ratio);
    }
    rep.sup_ratio = sup;
    const double cos_xi = std::cos(rep.angle.xi0);
    rep.C6 = opts.c6_safety * rep.C5 / (std::abs(params.lambda) * cos_xi) * sup;
    rep.delta = rep.angle.c0 * params.epsilon / cos_xi;

    rep.odi = odi::ODIParams{rep.delta, rep.C6, rep.R0, rep.theta, rep.kappa, p};
    rep.bound = odi::lifespan_bound_numeric(rep.odi);
    if (rep.delta < opts.closed_form_delta0) {
        rep.closed_form = odi::calibrate_closed_form(rep.odi, opts.closed_form_delta0);
        rep.closed_form_bound = rep.closed_form->evaluate(rep.delta);
        rep.closed_form_bound->budget = rep.bound.budget;
    }

    // delta = (c0 / cos xi0) eps
    const double scale = rep.angle.c0 / cos_xi;
    auto& d = rep.display;
    const auto tag = rep.bound.case_tag;
    if (tag == odi::BoundCase::Algebraic) {
        d.eps_exponent = 1.0 / rep.theta;
        d.inversion_log_exponent = rep.kappa / rep.theta;
        d.theorem_log_exponent = mode.kind == WeightKind::Log2D ? p - 1.0 : 0.0;
        d.inversion_shape = "C * eps^-" + fmt("%.6g", d.eps_exponent) + " * log(1/eps)^" + fmt("%.6g", d.inversion_log_exponent);
        d.theorem_shape = "C * eps^-" + fmt("%.6g", d.eps_exponent) + " * log(1/eps)^" + fmt("%.6g", d.theorem_log_exponent);
    } else if (tag == odi::BoundCase::SingleExp) {
        d.eps_exponent = (p - 1.0) / (1.0 - rep.kappa * (p - 1.0));
        d.inversion_shape = "exp(C * eps^-" + fmt("%.6g", d.eps_exponent) + ")";
        d.theorem_shape = d.inversion_shape;
        if (rep.closed_form) rep.eps_constant = rep.closed_form->C * std::pow(scale, -d.eps_exponent);
    } else {
        d.eps_exponent = p - 1.0;
        d.inversion_shape = "exp(exp(C * eps^-" + fmt("%.6g", d.eps_exponent) + "))";
        d.theorem_shape = d.inversion_shape;
        if (rep.closed_form) rep.eps_constant = rep.closed_form->C * std::pow(scale, -d.eps_exponent);
    }
    return rep;
}

Functionals weighted_functionals(const Trajectory& traj, const ModelParams& params, double R) {
    if (!(R > 0.0)) throw Error(ErrorKind::Domain, "functionals need R > 0");
    require_horizon(traj, R);
    const CutoffSpec spec(params.p, params.dim());
    const WeightMode& mode = params.weight;
    SnapshotIntegrator integ(traj, mode);
    auto breaks = [R](double t, std::vector<double>& out) { psi_breaks(R, t, out); };
    Functionals f;
    f.A = integ.integrate(
        RowKind::AbsPow, params.p,
        [&](double r, double t) { return mode.phi(r) * spec.psi_s(s_of(R, r, t)); }, breaks, R);
    f.A_star = integ.integrate(
        RowKind::AbsPow, params.p,
        [&](double r, double t) { return mode.phi(r) * spec.psi_star_s(s_of(R, r, t)); }, breaks, R);
    f.A = std::max(f.A, 0.0);
    f.A_star = std::max(f.A_star, 0.0);
    return f;
}

WeakForm weak_form(const Trajectory& traj, const ModelParams& params, const InitialData& data, double R) {
    require_horizon(traj, R);
    const CutoffSpec spec(params.p, params.dim());
    const WeightPhi phi{params.weight};
    const double tau = params.tau;
    const double cz = std::cos(params.zeta);
    const double sz = std::sin(params.zeta);
    const cplx rot = std::polar(1.0, params.zeta);

    WeakForm wf;
    const auto [lo, hi] = data.support();
    if (hi > lo) {
        std::vector<double> brk = data.f.breakpoints();
        const auto gb = data.g.breakpoints();
        brk.insert(brk.end(), gb.begin(), gb.end());
        auto integrand = [&](double r) -> cplx {
            const PsiJet j = psi_jet(spec, R, r, 0.0);
            const cplx v = tau * data.g(r) * j.psi + data.f(r) * (-tau * j.dt + rot * j.psi);
            return v * phi.value(r) * params.weight.measure(r);
        };
        wf.data = quad::integrate_complex(integrand, lo, hi, 1e-10, brk);
    }

    SnapshotIntegrator integ(traj, params.weight);
    auto breaks = [R](double t, std::vector<double>& out) { psi_breaks(R, t, out); };
    const double A = integ.integrate(
        RowKind::AbsPow, params.p,
        [&](double r, double t) { return phi.value(r) * spec.psi_s(s_of(R, r, t)); }, breaks, R);
    wf.source = params.lambda * A;

    auto k_re = [&](double r, double t) {
        const PsiJet j = psi_jet(spec, R, r, t);
        const double lap = phi.value(r) * j.lap + 2.0 * phi.dr(r) * j.dr + j.psi * phi.laplacian(r);
        return -lap + tau * phi.value(r) * j.dtt - cz * phi.value(r) * j.dt;
    };
    auto k_im = [&](double r, double t) {
        const PsiJet j = psi_jet(spec, R, r, t);
        return -sz * phi.value(r) * j.dt;
    };
    const double re_re = integ.integrate(RowKind::Real, params.p, k_re, breaks, R);
    const double im_im = sz != 0.0 ? integ.integrate(RowKind::Imag, params.p, k_im, breaks, R) : 0.0;
    const double re_im = sz != 0.0 ? integ.integrate(RowKind::Real, params.p, k_im, breaks, R) : 0.0;
    const double im_re = integ.integrate(RowKind::Imag, params.p, k_re, breaks, R);
    wf.bulk = cplx{re_re - im_im, re_im + im_re};

    const cplx lhs = params.epsilon * wf.data + wf.source;
    const double scale = std::max({std::abs(params.epsilon * wf.data), std::abs(wf.source), std::abs(wf.bulk), 1e-300});
    wf.relative_residual = std::abs(lhs - wf.bulk) / scale;
    return wf;
}

ChainReport inequality_chain(const Trajectory& traj, const ModelParams& params, const InitialData& data,
                             std::span<const double> R_list, const CertificateReport& cert, double chain_tol) {
    if (!(cert.C5 > 0.0)) throw Error(ErrorKind::Config, "cutoff constants missing from the certificate");
    const double pc = params.p_conj();
    const double lam = std::abs(params.lambda);
    const cplx proj = std::polar(1.0, cert.angle.xi0) / params.lambda;

    ChainReport rep;
    rep.passed = true;
    std::vector<odi::FunctionalSample> samples;
    for (double R : R_list) {
        if (R < cert.R0 * (1.0 - 1e-12)) throw Error(ErrorKind::Input, "chain radii must be >= R0");
        const Functionals f = weighted_functionals(traj, params, R);
        const WeakForm wf = weak_form(traj, params, data, R);
        ChainRow row;
        row.R = R;
        row.A = f.A;
        row.A_star = f.A_star;
        row.lhs = cert.angle.c0 * params.epsilon + std::cos(cert.angle.xi0) * f.A;
        row.mid = (proj * wf.bulk).real();
        row.rhs = cert.C5 / (lam * R) * std::pow(quad::phi_mass(R, params.weight), 1.0 / pc) * std::pow(f.A_star, 1.0 / params.p);
        row.slack = row.rhs - row.lhs;
        row.weak_residual = wf.relative_residual;
        row.ok = row.slack >= -chain_tol * row.rhs;
        rep.passed = rep.passed && row.ok;
        rep.rows.push_back(row);
        samples.push_back({R, f.A, f.A_star});
    }
    odi::ODIParams crit = cert.odi;
    crit.delta = cert.delta;
    rep.criterion = odi::verify_criterion(samples, crit);
    return rep;
}

nlohmann::json to_json(const odi::ODIBound& b) {
    return {
        {"case", odi::to_string(b.case_tag)},
        {"T_upper", std::isfinite(b.T_upper) ? nlohmann::json(b.T_upper) : nlohmann::json(nullptr)},
        {"log_T", std::isfinite(b.log_T) ? nlohmann::json(b.log_T) : nlohmann::json(nullptr)},
        {"log_log_T", b.log_log_T},
        {"budget", b.budget},
        {"symbolic", b.symbolic},
    };
}

nlohmann::json to_json(const CertificateReport& rep) {
    const auto& c = rep.constants;
    nlohmann::json j = {
        {"model",
         {{"tau", rep.params.tau},
          {"zeta", rep.params.zeta},
          {"lambda", {rep.params.lambda.real(), rep.params.lambda.imag()}},
          {"p", rep.params.p},
          {"epsilon", rep.params.epsilon},
          {"weight", rep.params.weight.kind == WeightKind::Log2D ? "log2d" : "power"},
          {"dim", rep.params.weight.dim}}},
        {"angle",
         {{"xi0", rep.angle.xi0},
          {"c0", rep.angle.c0},
          {"moment", {rep.angle.moment.real(), rep.angle.moment.imag()}}}},
        {"constants",
         {{"C1", c.C1},
          {"C2", c.C2},
          {"C3", c.C3},
          {"C3_consumed", c.C3_consumed},
          {"C4", c.C4},
          {"C5", rep.C5},
          {"C6", rep.C6},
          {"safety", c.safety},
          {"samples", c.samples}}},
        {"R0", rep.R0},
        {"theta", rep.theta},
        {"kappa", rep.kappa},
        {"delta", rep.delta},
        {"bound", to_json(rep.bound)},
        {"exponents",
         {{"eps_exponent", rep.display.eps_exponent},
          {"inversion_log_exponent", rep.display.inversion_log_exponent},
          {"theorem_log_exponent", rep.display.theorem_log_exponent},
          {"inversion_shape", rep.display.inversion_shape},
          {"theorem_shape", rep.display.theorem_shape}}},
    };
    if (rep.closed_form) {
        j["closed_form"] = {{"shape", rep.closed_form->shape()},
                            {"C", rep.closed_form->C},
                            {"delta0", rep.closed_form->delta0},
                            {"bound", to_json(*rep.closed_form_bound)}};
    }
    if (rep.eps_constant) j["eps_constant"] = *rep.eps_constant;
    return j;
}

void write_chain_csv(std::ostream& os, const ChainReport& chain) {
    os << "R,A,A_star,lhs,mid,rhs,slack,weak_residual,ok\n";
    char buf[512];
    for (const auto& r : chain.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.R, r.A, r.A_star, r.lhs,
                      r.mid, r.rhs, r.slack, r.weak_residual, r.ok ? 1 : 0);
        os << buf;
    }
}

}  // namespace blowlab

#include "blowlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "blowlab/errors.hpp"
#include "blowlab/kernels.hpp"

namespace blowlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Smallest step, in units of ulp(t), that still advances time meaningfully.
constexpr double kTimeResolution = 1e3;

struct Workspace {
    std::vector<cplx> tmp;
    std::vector<cplx> lap;
    std::vector<double> w1, w2, w3, w4;
    std::vector<cplx> lower, diag, upper, scratch;

    explicit Workspace(std::size_t n)
        : tmp(n), lap(n), w1(n), w2(n), w3(n), w4(n), lower(n), diag(n), upper(n), scratch(n) {}
};

// u <- u + dt * c |u|^p by classical RK4; all four stages share the complex
// factor c, so only the real |.|^p samples differ between them.
void reaction_rk4(const kernels::KernelTable& k, std::vector<cplx>& u, cplx c, double p, double dt, Workspace& ws) {
    k.abs_pow(u, p, ws.w1);
    k.axpy_real_weight(u, 0.5 * dt * c, ws.w1, ws.tmp);
    k.abs_pow(ws.tmp, p, ws.w2);
    k.axpy_real_weight(u, 0.5 * dt * c, ws.w2, ws.tmp);
    k.abs_pow(ws.tmp, p, ws.w3);
    k.axpy_real_weight(u, dt * c, ws.w3, ws.tmp);
    k.abs_pow(ws.tmp, p, ws.w4);
    for (std::size_t i = 0; i < u.size(); ++i) ws.w1[i] += 2.0 * (ws.w2[i] + ws.w3[i]) + ws.w4[i];
    k.axpy_real_weight(u, dt * c / 6.0, ws.w1, u);
}

// (I - beta L) x = rhs with Dirichlet rows at both ends; rhs is overwritten.
void implicit_diffusion(std::vector<cplx>& rhs, cplx beta, const RadialGrid& grid, int dim, Workspace& ws) {
    const std::size_t n = rhs.size();
    const double h = grid.h();
    const double inv_h2 = 1.0 / (h * h);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double drift = (dim - 1.0) / (2.0 * grid.r(i) * h);
        ws.lower[i] = -beta * (inv_h2 - drift);
        ws.diag[i] = 1.0 + 2.0 * beta * inv_h2;
        ws.upper[i] = -beta * (inv_h2 + drift);
    }
    ws.lower[0] = ws.upper[0] = 0.0;
    ws.diag[0] = 1.0;
    ws.lower[n - 1] = ws.upper[n - 1] = 0.0;
    ws.diag[n - 1] = 1.0;
    rhs[0] = 0.0;
    rhs[n - 1] = 0.0;
    solve_tridiagonal(ws.lower, ws.diag, ws.upper, rhs, ws.scratch);
}

// F(u) = Lap u + lambda |u|^p
void wave_force(const kernels::KernelTable& k, const std::vector<cplx>& u, cplx lambda, double p, bool diffusion,
                const RadialGrid& grid, int dim, Workspace& ws, std::vector<cplx>& out) {
    if (diffusion) {
        k.radial_laplacian(u, 1.0, grid.h(), dim, ws.lap);
    } else {
        std::fill(ws.lap.begin(), ws.lap.end(), cplx{});
    }
    k.abs_pow(u, p, ws.w1);
    k.axpy_real_weight(ws.lap, lambda, ws.w1, out);
    out.front() = 0.0;
    out.back() = 0.0;
}

}  // namespace

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::Threshold: return "threshold";
        case StopReason::AbortNorm: return "abort_norm";
        case StopReason::TimeLimit: return "time_limit";
        case StopReason::StepLimit: return "step_limit";
        case StopReason::NonFinite: return "non_finite";
    }
    return "?";
}

const char* to_string(LifespanStatus s) {
    switch (s) {
        case LifespanStatus::BlowUp: return "BlowUp";
        case LifespanStatus::SurvivedTo: return "SurvivedTo";
        case LifespanStatus::Inconclusive: return "Inconclusive";
    }
    return "?";
}

RadialGrid RadialGrid::with_spacing(double r_max, double h) {
    if (!(h > 0.0) || !(r_max > 1.0)) throw Error(ErrorKind::Input, "grid needs h > 0 and r_max > 1");
    RadialGrid g;
    g.n = static_cast<std::size_t>(std::ceil((r_max - 1.0) / h)) + 1;
    g.r_max = 1.0 + h * static_cast<double>(g.n - 1);
    return g;
}

void RadialGrid::validate() const {
    if (n < 64) throw Error(ErrorKind::Input, "radial grid needs n >= 64");
    if (!(r_max > 1.0) || !std::isfinite(r_max)) throw Error(ErrorKind::Input, "radial grid needs r_max > 1");
}

void solve_tridiagonal(std::span<const cplx> lower, std::span<const cplx> diag, std::span<const cplx> upper,
                       std::span<cplx> rhs, std::span<cplx> scratch) {
    const std::size_t n = diag.size();
    if (n == 0) return;
    if (lower.size() != n || upper.size() != n || rhs.size() != n || scratch.size() < n) {
        throw Error(ErrorKind::Input, "tridiagonal system size mismatch");
    }
    if (std::abs(diag[0]) == 0.0) throw Error(ErrorKind::Numerical, "singular tridiagonal system");
    scratch[0] = upper[0] / diag[0];
    rhs[0] /= diag[0];
    for (std::size_t i = 1; i < n; ++i) {
        const cplx denom = diag[i] - lower[i] * scratch[i - 1];
        if (std::abs(denom) == 0.0) throw Error(ErrorKind::Numerical, "singular tridiagonal system");
        scratch[i] = upper[i] / denom;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}

Trajectory evolve(const ModelParams& params, const InitialData& data, const RadialGrid& grid,
                  const SolverOptions& opts) {
    params.validate(false);
    data.validate();
    grid.validate();
    const bool edge_zeta = std::abs(std::abs(params.zeta) - std::numbers::pi / 2.0) < 1e-12;
    if (params.tau == 0 && edge_zeta && !opts.dispersive) {
        throw Error(ErrorKind::Input, "zeta = +-pi/2 with tau = 0 requires the dispersive scheme flag");
    }
    if (!(opts.safety > 0.0) || !(opts.dt_max > 0.0)) throw Error(ErrorKind::Input, "solver needs safety, dt_max > 0");

    const auto& k = kernels::active();
    const std::size_t n = grid.n;
    const double h = grid.h();
    const int dim = params.dim();
    const double p = params.p;
    const double lam_abs = std::abs(params.lambda);

    Trajectory traj;
    traj.grid = grid;
    traj.dim = dim;
    traj.tau = params.tau;
    traj.kernel_variant = std::string(k.name);

    std::vector<cplx> u(n), v;
    for (std::size_t i = 1; i + 1 < n; ++i) u[i] = params.epsilon * data.f(grid.r(i));
    if (params.tau == 1) {
        v.assign(n, cplx{});
        for (std::size_t i = 1; i + 1 < n; ++i) v[i] = params.epsilon * data.g(grid.r(i));
    }
    Workspace ws(n);

    const auto leak_start = static_cast<std::size_t>(std::floor((1.0 - opts.leak_fraction) * static_cast<double>(n - 1)));
    auto band = [&](const std::vector<cplx>& x) {
        return k.max_abs(std::span<const cplx>(x).subspan(leak_start, n - 1 - leak_start));
    };

    double m = k.max_abs(u);
    traj.initial_max = m;
    traj.boundary_leak = band(u);
    const double leak_limit = opts.leak_tol * m;
    if (opts.diffusion && traj.boundary_leak > leak_limit) {
        throw Error(ErrorKind::DomainTooSmall, "initial data reach the outer band; increase r_max");
    }

    double t = 0.0;
    traj.series.push_back({0.0, 0.0, m});
    if (opts.keep_snapshots) traj.snapshots.push_back({0.0, u});
    double snap_interval = opts.dt_max;
    double snap_growth = opts.snapshot_growth;
    double snap_t = 0.0;
    double snap_m = m;

    const cplx rot = std::polar(1.0, -params.zeta);
    const cplx reaction = rot * params.lambda;
    const cplx damping = std::polar(1.0, params.zeta);
    std::vector<cplx> force;
    if (params.tau == 1) {
        force.resize(n);
        wave_force(k, u, params.lambda, p, opts.diffusion, grid, dim, ws, force);
    }

    traj.dt_min = kInf;
    traj.stop = StopReason::TimeLimit;
    while (true) {
        if (traj.steps >= opts.max_steps) {
            traj.stop = StopReason::StepLimit;
            break;
        }
        double dt = std::max(opts.dt_max, opts.dt_max_rel * t);
        if (m > 0.0 && lam_abs > 0.0) {
            const double scale = std::pow(m, 1.0 - p) / lam_abs;
            double react = opts.safety * scale / (p - 1.0);
            if (params.tau == 1) react = std::min(react, opts.safety * std::sqrt(scale));
            dt = std::min(dt, react);
        }
        if (params.tau == 1 && opts.diffusion) dt = std::min(dt, opts.cfl * h);
        dt = std::min(dt, opts.t_end - t);
        if (!(dt > 0.0)) break;
        if (traj.steps > 0 && dt < kTimeResolution * (std::nextafter(t, kInf) - t)) {
            // t can no longer resolve the step.
            traj.stop = dt <= traj.dt_initial / opts.dt_contraction ? StopReason::Threshold : StopReason::AbortNorm;
            break;
        }
        if (traj.steps == 0) traj.dt_initial = dt;

        if (params.tau == 0) {
            reaction_rk4(k, u, reaction, p, dt, ws);
            u.front() = 0.0;
            u.back() = 0.0;
            if (opts.diffusion) {
                if (edge_zeta) {
                    k.radial_laplacian(u, 1.0, h, dim, ws.lap);
                    for (std::size_t i = 1; i + 1 < n; ++i) u[i] += 0.5 * dt * rot * ws.lap[i];
                    implicit_diffusion(u, 0.5 * dt * rot, grid, dim, ws);
                } else {
                    implicit_diffusion(u, dt * rot, grid, dim, ws);
                }
            }
        } else {
            const cplx a = 0.25 * dt * damping;
            const cplx keep = (1.0 - a) / (1.0 + a);
            const cplx push = 0.5 * dt / (1.0 + a);
            for (std::size_t i = 1; i + 1 < n; ++i) v[i] = keep * v[i] + push * force[i];
            for (std::size_t i = 1; i + 1 < n; ++i) u[i] += dt * v[i];
            wave_force(k, u, params.lambda, p, opts.diffusion, grid, dim, ws, force);
            for (std::size_t i = 1; i + 1 < n; ++i) v[i] = keep * v[i] + push * force[i];
        }
        t += dt;
        ++traj.steps;
        traj.dt_min = std::min(traj.dt_min, dt);

        m = k.max_abs(u);
        traj.series.push_back({t, dt, m});
        if (!std::isfinite(m)) {
            traj.stop = StopReason::NonFinite;
            break;
        }
        const double leak = band(u);
        traj.boundary_leak = std::max(traj.boundary_leak, leak);
        if (opts.diffusion && leak > leak_limit) {
            char msg[160];
            std::snprintf(msg, sizeof msg, "solution reached the outer band (leak %.3g at t = %.6g); increase r_max",
                          leak, t);
            throw Error(ErrorKind::DomainTooSmall, msg);
        }

        if (opts.keep_snapshots && (t - snap_t >= snap_interval || m >= snap_growth * snap_m)) {
            traj.snapshots.push_back({t, u});
            snap_t = t;
            snap_m = m;
            if (traj.snapshots.size() >= opts.max_snapshots) {
                std::vector<Snapshot> thin;
                thin.reserve(opts.max_snapshots / 2 + 1);
                for (std::size_t i = 0; i < traj.snapshots.size(); i += 2) thin.push_back(std::move(traj.snapshots[i]));
                traj.snapshots = std::move(thin);
                snap_interval *= 2.0;
                snap_growth *= snap_growth;
            }
        }

        if (m >= opts.blowup_threshold && dt <= traj.dt_initial / opts.dt_contraction) {
            traj.stop = StopReason::Threshold;
            break;
        }
        if (m >= opts.abort_norm) {
            traj.stop = StopReason::AbortNorm;
            break;
        }
        if (t >= opts.t_end) {
            traj.stop = StopReason::TimeLimit;
            break;
        }
    }
    traj.t_final = t;
    if (!std::isfinite(traj.dt_min)) traj.dt_min = 0.0;
    if (opts.keep_snapshots && traj.snapshots.back().t < t && std::isfinite(m)) traj.snapshots.push_back({t, u});
    return traj;
}

LifespanEstimate detect_blowup(const Trajectory& traj, const ModelParams& params, double threshold,
                               double dt_contraction, std::size_t k) {
    if (traj.series.empty()) throw Error(ErrorKind::Input, "empty trajectory");
    LifespanEstimate est;
    est.t_end = traj.t_final;
    est.T_lo = traj.t_final;

    double m_max = 0.0;
    bool hit = false;
    for (const auto& s : traj.series) {
        if (std::isfinite(s.maxnorm)) m_max = std::max(m_max, s.maxnorm);
        if (!hit && s.maxnorm >= threshold) {
            hit = true;
            est.threshold_hit = s.t;
        }
    }
    if (!hit && traj.stop == StopReason::Threshold) {
        // Stopped on time resolution after dt collapsed, below the threshold.
        hit = true;
        est.threshold_hit = traj.t_final;
    }
    if (!hit) {
        if (traj.stop == StopReason::StepLimit) {
            est.reason = "step limit reached before the threshold";
        } else if (traj.stop == StopReason::NonFinite) {
            est.reason = "non-finite values below the threshold";
        } else {
            est.status = LifespanStatus::SurvivedTo;
        }
        return est;
    }
    const double contraction = traj.dt_min > 0.0 ? traj.dt_initial / traj.dt_min : 0.0;
    if (contraction < dt_contraction) {
        est.reason = "possible instability: threshold reached without dt contraction";
        return est;
    }

    const double gamma = traj.tau == 1 ? 0.5 * (params.p - 1.0) : params.p - 1.0;
    std::vector<std::pair<double, double>> pts;
    for (auto it = traj.series.rbegin(); it != traj.series.rend() && pts.size() < k; ++it) {
        if (std::isfinite(it->maxnorm) && it->maxnorm > 0.0) pts.emplace_back(it->t, std::pow(it->maxnorm, -gamma));
    }
    if (pts.size() < 2) {
        est.reason = "too few samples to extrapolate";
        return est;
    }
    const double t_ref = pts.front().first;
    double st = 0.0, sz = 0.0, stt = 0.0, stz = 0.0;
    for (const auto& [tt, z] : pts) {
        const double x = tt - t_ref;
        st += x;
        sz += z;
        stt += x * x;
        stz += x * z;
    }
    const double cnt = static_cast<double>(pts.size());
    const double slope = (cnt * stz - st * sz) / (cnt * stt - st * st);
    const double icpt = (sz - slope * st) / cnt;
    if (!(slope < 0.0)) {
        est.reason = "max-norm growth does not extrapolate to a finite time";
        return est;
    }
    const double t_star = t_ref - icpt / slope;
    const double m_last = traj.series.back().maxnorm;
    const double lam = std::abs(params.lambda);
    double scale = std::pow(m_last, 1.0 - params.p) / lam;
    scale = traj.tau == 1 ? std::sqrt(scale) : scale / (params.p - 1.0);
    est.status = LifespanStatus::BlowUp;
    est.T_est = std::max(t_star, est.T_lo);
    est.T_hi = std::max(est.T_est, t_star + scale);
    return est;
}

double ode_oracle(const ModelParams& params) {
    if (!(params.p > 1.0)) throw Error(ErrorKind::Domain, "ODE oracle needs p > 1");
    if (params.lambda.imag() != 0.0 || !(params.lambda.real() > 0.0) || params.zeta != 0.0) {
        throw Error(ErrorKind::Domain, "ODE oracle needs real lambda > 0 and zeta = 0");
    }
    return std::pow(params.epsilon, 1.0 - params.p) / (params.lambda.real() * (params.p - 1.0));
}

}  // namespace blowlab

// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Usage: acceptance [output-dir]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "blowlab/certifier.hpp"
#include "blowlab/cutoff.hpp"
#include "blowlab/errors.hpp"
#include "blowlab/harness.hpp"
#include "blowlab/odi.hpp"
#include "blowlab/quadrature.hpp"
#include "blowlab/solver.hpp"

using namespace blowlab;
namespace fs = std::filesystem;
using std::numbers::ln2;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

const char* kHeatP15 = R"(
[model]
tau = 0
zeta = 0
lambda = 1
p = 1.5
epsilon = 1
weight = log2d

[data]
f = bump
f_lo = 1.25
f_hi = 2.0

[grid]
r_max = 12
h = 0.02

[solver]
dt_max = 0.01
dt_max_rel = 0.01
t_end = 1e5

[certifier]
enabled = true

[sweep]
eps_min = 0.01
eps_max = 1
count = 8
)";

const char* kHeatP2 = R"(
[model]
tau = 0
zeta = 0
lambda = 1
p = 2
epsilon = 1
weight = log2d

[data]
f = annulus
f_lo = 1.5
f_hi = 8
f_ramp = 0.5

[grid]
r_max = 30
h = 0.02

[solver]
dt_max = 0.01
dt_max_rel = 0.01
t_end = 1e5

[certifier]
enabled = true

[sweep]
epsilons = 1, 0.75, 0.5
)";

RunConfig parse(const char* text) {
    std::istringstream in(text);
    return parse_config(in);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 1 ------------------------------------------------------------------------

Outcome ode_oracle_check() {
    Outcome out{true, ""};
    const InitialData cell{RadialProfile::constant(), RadialProfile::zero()};
    SolverOptions o;
    o.diffusion = false;
    o.t_end = 50.0;
    o.keep_snapshots = false;
    for (auto [p, eps] : {std::pair{2.0, 0.1}, std::pair{1.5, 0.04}}) {
        ModelParams m;
        m.p = p;
        m.epsilon = eps;
        const auto t0 = std::chrono::steady_clock::now();
        const Trajectory tr = evolve(m, cell, RadialGrid{2.0, 64}, o);
        const LifespanEstimate est = detect_blowup(tr, m);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double T = ode_oracle(m);
        const double rel = std::abs(est.T_est - T) / T;
        const bool ok = est.status == LifespanStatus::BlowUp && rel <= 0.01 && secs < 1.0;
        out.pass = out.pass && ok;
        out.detail += fmt("p=%g eps=%g T_est=%.6f (oracle %.6f, rel %.1e, %.2fs); ", p, eps, est.T_est, T, rel, secs);
    }
    return out;
}

// 2 ------------------------------------------------------------------------

Outcome cutoff_suite() {
    const double p = 1.5;
    const CutoffSpec spec(p);
    const double Rs[] = {10.0, 100.0, 1000.0};
    const std::size_t samples = 100000;
    bool ok = true;
    std::string detail;

    // (i): psi = 1 on P(R/2), everything vanishes off P(R)
    std::mt19937_64 rng(101);
    std::size_t support_bad = 0;
    for (double R : Rs) {
        std::uniform_real_distribution<double> ur(1.0, 1.0 + 1.5 * std::sqrt(R)), ut(0.0, 1.5 * R);
        for (std::size_t i = 0; i < samples; ++i) {
            const double r = ur(rng), t = ut(rng);
            const double s = s_of(R, r, t);
            const PsiJet j = psi_jet(spec, R, r, t);
            if (s <= 0.5 && !(j.psi == 1.0 && j.dt == 0.0 && j.dtt == 0.0 && j.dr == 0.0 && j.lap == 0.0)) ++support_bad;
            if (s >= 1.0 && !(j.psi == 0.0 && j.psi_star == 0.0 && j.dt == 0.0 && j.dtt == 0.0 && j.dr == 0.0 && j.lap == 0.0)) {
                ++support_bad;
            }
        }
    }
    ok = ok && support_bad == 0;
    detail += fmt("(i) violations %zu; ", support_bad);

    // (ii)-(v): per-R constants, their spread, and an independent sample check
    std::vector<LemmaConstants> per;
    for (double R : Rs) {
        const double one[] = {R};
        per.push_back(estimate_constants(spec, one, samples));
    }
    const LemmaConstants all = estimate_constants(spec, Rs, samples);
    double spread = 0.0;
    for (auto field : {&LemmaConstants::C1, &LemmaConstants::C2, &LemmaConstants::C3, &LemmaConstants::C4}) {
        double lo = INFINITY, hi = 0.0;
        for (const auto& c : per) {
            if (!std::isfinite(c.*field) || !(c.*field > 0.0)) ok = false;
            lo = std::min(lo, c.*field);
            hi = std::max(hi, c.*field);
        }
        spread = std::max(spread, (hi - lo) / hi);
    }
    ok = ok && spread <= 0.05;
    std::size_t exceed = 0;
    std::mt19937_64 rng2(202);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (double R : Rs) {
        for (std::size_t i = 0; i < samples; ++i) {
            // uniform in the band 1/2 <= s <= 1
            const double s = 0.5 + 0.5 * u01(rng2);
            const double x = std::sqrt(s * R) * u01(rng2);
            const double r = 1.0 + std::max(x, kBoundaryBand);
            const double t = s * R - x * x;
            const BoundRatios b = bound_ratios(spec, R, r, t);
            if (b.dt > all.C1 || b.dtt > all.C2 || b.dr > all.C3 || b.lap > all.C4 || b.consumed > all.C3_consumed) {
                ++exceed;
            }
        }
    }
    ok = ok && exceed == 0;
    detail += fmt("C1..C4 = %.4g %.4g %.4g %.4g, spread %.2f%%, fresh-sample exceedances %zu; ", all.C1, all.C2, all.C3,
                  all.C4, 100.0 * spread, exceed);

    // log inequality on [1, 1000]
    std::size_t log_bad = 0;
    for (int i = 0; i <= 1000000; ++i) {
        const double r = 1.0 + 999.0 * i / 1e6;
        if (1.0 - 1.0 / r > std::log(r)) ++log_bad;
    }
    ok = ok && log_bad == 0;
    detail += fmt("1-1/r <= log r violations %zu; ", log_bad);

    // layer-cake inequality on a box weight
    const double R = 16.0;
    const double r0 = 1.5, r1 = 3.0, t0 = 0.5, t1 = 6.0;
    auto in_box = [&](double r, double t) { return r >= r0 && r <= r1 && t >= t0 && t <= t1; };
    auto box_r_breaks = [&](double scale) {
        std::vector<double> b{r0, r1, 1.0 + std::sqrt(0.5 * scale)};
        for (double tb : {t0, t1}) {
            for (double c : {scale, 0.5 * scale}) {
                if (c > tb) b.push_back(1.0 + std::sqrt(c - tb));
            }
        }
        return b;
    };
    auto box_t_breaks = [&](double r, double scale, std::vector<double>& out) {
        out.push_back(t0);
        out.push_back(t1);
        out.push_back(0.5 * scale - (r - 1.0) * (r - 1.0));
    };
    auto star_mass = [&](double rho) {
        quad::PRIntegrand f;
        f.f = [&, rho](double r, double t) { return in_box(r, t) ? spec.psi_star_s(s_of(rho, r, t)) : 0.0; };
        f.t_breaks = box_t_breaks;
        f.r_breaks = box_r_breaks(rho);
        return quad::integrate_PR(f, rho, 1e-9);
    };
    quad::PRIntegrand g;
    g.f = [&](double r, double t) { return in_box(r, t) ? spec.psi_s(s_of(R, r, t)) : 0.0; };
    g.t_breaks = box_t_breaks;
    g.r_breaks = box_r_breaks(R);
    const double rhs = ln2 * quad::integrate_PR(g, R, 1e-10);
    std::vector<double> rho_breaks;
    for (double r : {r0, r1}) {
        for (double t : {t0, t1}) {
            rho_breaks.push_back((r - 1.0) * (r - 1.0) + t);
            rho_breaks.push_back(2.0 * ((r - 1.0) * (r - 1.0) + t));
        }
    }
    const double lhs = quad::integrate([&](double rho) { return star_mass(rho) / rho; }, 0.25, R, 1e-7, rho_breaks);
    quad::PRIntegrand h = g;
    h.f = [&](double r, double t) { return in_box(r, t) ? layer_integral(spec, s_of(R, r, t)) : 0.0; };
    const double fubini = quad::integrate_PR(h, R, 1e-8);
    const double agree = std::abs(lhs - fubini) / fubini;
    ok = ok && lhs <= rhs * (1.0 + 1e-3) && agree <= 1e-3;
    detail += fmt("layer-cake lhs %.6g <= log2*rhs %.6g (two evaluations agree to %.1e)", lhs, rhs, agree);
    return {ok, detail};
}

// 3 ------------------------------------------------------------------------

Outcome phi_mass_check() {
    bool ok = true;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double R = std::pow(10.0, -2.0 + 8.0 * i / 49.0);
        const double m = quad::phi_mass(R), b = quad::phi_mass_bound(R);
        ok = ok && m <= b;
        worst = std::max(worst, m / b);
    }
    // int_1^2 (2r - r^2) r log r dr by its antiderivative
    auto F = [](double r) {
        const double L = std::log(r);
        return 2.0 * r * r * r / 3.0 * L - 2.0 * r * r * r / 9.0 - (std::pow(r, 4) / 4.0 * L - std::pow(r, 4) / 16.0);
    };
    const double oracle = 2.0 * pi * (F(2.0) - F(1.0));
    const double m1 = quad::phi_mass(1.0), b1 = quad::phi_mass_bound(1.0);
    ok = ok && std::abs(m1 - oracle) <= 1e-8 * oracle && std::abs(b1 - 4.0 * pi * ln2) <= 1e-12 * b1 && m1 <= b1;
    return {ok, fmt("max mass/bound over 50 R = %.4f; R=1: mass %.6f (oracle %.6f), bound %.6f", worst, m1, oracle, b1)};
}

// 4 ------------------------------------------------------------------------

Outcome odi_round_trip() {
    using namespace odi;
    bool ok = true;
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    int counts[3] = {0, 0, 0};
    for (int i = 0; i < 100; ++i) {
        ODIParams q;
        q.C0 = 0.5 + 4.5 * u(rng);
        q.R1 = std::exp(1.0) * (1.0 + 3.0 * u(rng));
        q.p = 1.1 + 1.4 * u(rng);
        const int kind = i % 3;
        if (kind == 0) {
            q.theta = 0.05 + 2.95 * u(rng);
            q.kappa = -1.0 + 3.0 * u(rng);
        } else if (kind == 1) {
            q.theta = 0.0;
            q.kappa = 0.95 * u(rng) / (q.p - 1.0);
        } else {
            q.theta = 0.0;
            q.kappa = 1.0 / (q.p - 1.0);
        }
        ++counts[static_cast<int>(classify(q))];
        const double log_T = std::log(q.R1) + 0.5 + 30.0 * u(rng);
        const double rho = rho_of_log_T(q, log_T);
        q.delta = std::pow(ln2 * std::pow(q.C0, q.p) / ((q.p - 1.0) * rho), 1.0 / (q.p - 1.0));
        const double err = std::abs(lifespan_bound_numeric(q).log_T - log_T);  // relative error in T
        worst = std::max(worst, err);
    }
    ok = ok && worst <= 1e-6;

    const ODIBound a = lifespan_bound_numeric({0.01, 1.0, 1.0 + 1e-12, 0.5, 0.0, 2.0});
    const double a_oracle = std::pow(1.0 + 50.0 * ln2, 2.0);
    const double a_err = std::abs(a.T_upper - a_oracle) / a_oracle;
    const ODIBound d = lifespan_bound_numeric({0.1, 1.0, std::exp(1.0), 0.0, 1.0, 2.0});
    const double d_err = std::abs(d.log_log_T - 10.0 * ln2) / (10.0 * ln2);
    ODIParams g{0.05, 2.0, 3.0, 0.7, 0.0, 1.6};
    const double ga = g.theta * (g.p - 1.0);
    const double g_oracle = std::log(std::pow(g.R1, ga) + ga * budget(g)) / ga;
    const double g_err = std::abs(lifespan_bound_numeric(g).log_T - g_oracle) / g_oracle;
    ok = ok && a_err <= 1e-9 && d_err <= 1e-9 && g_err <= 1e-9 && d.case_tag == BoundCase::DoubleExp;
    return {ok, fmt("100 draws (%d/%d/%d algebraic/single/double), worst relative T error %.1e; "
                    "T(0.01) = %.4f vs %.4f; log log T(0.1) = %.6f vs 10 log 2",
                    counts[0], counts[1], counts[2], worst, a.T_upper, a_oracle, d.log_log_T)};
}

// 5 ------------------------------------------------------------------------

Outcome chain_check() {
    RunConfig cfg = parse(kHeatP15);
    cfg.grid = RadialGrid::with_spacing(60.0, 0.02);
    const InitialData data = cfg.data;
    const Trajectory tr = evolve(cfg.model, data, cfg.grid, cfg.solver);
    const LifespanEstimate est = detect_blowup(tr, cfg.model);
    if (est.status != LifespanStatus::BlowUp) return {false, "heat run did not blow up: " + est.reason};
    const CertificateReport cert = certify(cfg.model, data, cfg.certifier);
    std::vector<double> Rs;
    const double R_hi = est.T_lo;
    for (int i = 0; i < 10; ++i) Rs.push_back(std::exp(std::log(cert.R0) + i / 9.0 * (std::log(R_hi) - std::log(cert.R0))));
    const ChainReport chain = inequality_chain(tr, cfg.model, data, Rs, cert, 0.05);
    double worst = INFINITY, weak = 0.0;
    for (const auto& row : chain.rows) {
        worst = std::min(worst, row.slack / row.rhs);
        weak = std::max(weak, row.weak_residual);
    }
    const bool ok = chain.passed && chain.criterion.passed && chain.rows.size() == 10;
    return {ok, fmt("T_est %.4f, R in [%.3f, %.3f], min slack/rhs %.3f, criterion min C0 %.4g vs C6 %.4g, "
                    "max weak-form residual %.2e",
                    est.T_est, Rs.front(), Rs.back(), worst, chain.criterion.min_C0, cert.C6, weak)};
}

// 6 / 9 --------------------------------------------------------------------

struct SweepRun {
    std::vector<SweepRecord> records;
    FitReport fit;
    ReportPaths paths;
};

SweepRun run_sweep(const RunConfig& cfg) {
    SweepRun s;
    s.records = sweep(cfg);
    s.fit = fit_scaling(s.records, FitModel::PowerLog, cfg.model.p);
    s.paths = emit_report(s.records, {s.fit}, cfg.out_dir);
    return s;
}

Outcome sweep_check(const SweepRun& s) {
    bool all_blowup = true;
    for (const auto& r : s.records) all_blowup = all_blowup && r.error.empty() && r.lifespan.status == LifespanStatus::BlowUp && r.bound;
    const bool ok = s.records.size() == 8 && all_blowup && s.fit.dominance && s.fit.monotone;
    std::string detail = fmt("%zu records, T from %.4g (eps=1) to %.4g (eps=0.01); dominance %s, monotone %s; "
                             "fitted slope %.4f vs (p-1)/(2-p) = %.4f, r2 %.5f",
                             s.records.size(), s.records.front().lifespan.T_est, s.records.back().lifespan.T_est,
                             s.fit.dominance ? "yes" : "no", s.fit.monotone ? "yes" : "no", s.fit.slope,
                             s.fit.theory_slope.value_or(NAN), s.fit.r2);
    return {ok, detail};
}

Outcome determinism_check(const SweepRun& a, const SweepRun& b) {
    bool ok = slurp(a.paths.csv) == slurp(b.paths.csv) && !slurp(a.paths.csv).empty();
    std::size_t series = 0;
    for (const auto& e : fs::directory_iterator(a.paths.csv.parent_path())) {
        const auto name = e.path().filename().string();
        if (name.rfind("series_eps_", 0) != 0) continue;
        ok = ok && slurp(e.path()) == slurp(b.paths.csv.parent_path() / name);
        ++series;
    }
    ok = ok && series == a.records.size();
    return {ok, fmt("sweep.csv and %zu series CSVs byte-identical across two runs", series)};
}

// 7 ------------------------------------------------------------------------

Outcome p2_check(const fs::path& out) {
    RunConfig cfg = parse(kHeatP2);
    cfg.out_dir = out;
    const auto records = sweep(cfg);
    bool ok = records.size() == 3;
    std::string detail;
    for (const auto& r : records) {
        const bool dbl = r.bound && r.bound->case_tag == odi::BoundCase::DoubleExp;
        const bool below = r.bound && std::log(r.lifespan.T_est) <= r.bound->log_T;
        ok = ok && r.error.empty() && r.lifespan.status == LifespanStatus::BlowUp && dbl && below && r.epsilon >= 0.5;
        detail += fmt("eps=%g T_est %.4f <= %s; ", r.epsilon, r.lifespan.T_est, r.bound ? r.bound->symbolic.c_str() : "-");
    }
    ModelParams small = cfg.model;
    small.epsilon = 1e-4;
    const CertificateReport cert = certify(small, cfg.data, cfg.certifier);
    const bool shape = cert.bound.case_tag == odi::BoundCase::DoubleExp && cert.eps_constant &&
                       cert.display.inversion_shape == "exp(exp(C * eps^-1))";
    ok = ok && shape;
    detail += fmt("certified shape at eps=%g: %s with C = %.6g (delta %.3g)", small.epsilon,
                  cert.display.inversion_shape.c_str(), cert.eps_constant.value_or(NAN), cert.delta);
    return {ok, detail};
}

// 8 ------------------------------------------------------------------------

Outcome solver_quality() {
    RunConfig cfg = parse(kHeatP15);
    cfg.solver.keep_snapshots = false;
    auto lifespan = [&](double h, double safety) {
        SolverOptions o = cfg.solver;
        o.safety = safety;
        const RadialGrid g = RadialGrid::with_spacing(60.0, h);
        const LifespanEstimate e = detect_blowup(evolve(cfg.model, cfg.data, g, o), cfg.model);
        return e.status == LifespanStatus::BlowUp ? e.T_est : NAN;
    };
    const double base = lifespan(0.02, 0.05);
    const double fine = lifespan(0.01, 0.05);
    const double half = lifespan(0.02, 0.025);
    const double dh = std::abs(fine - base) / fine;
    const double ds = std::abs(half - base) / half;
    bool ok = dh <= 0.05 && ds <= 0.05;

    SolverOptions o = cfg.solver;
    o.keep_snapshots = true;
    o.t_end = 20.0;
    const RadialGrid g = RadialGrid::with_spacing(40.0, 0.02);
    const Trajectory tr = evolve(cfg.model, cfg.data, g, o);
    std::size_t dirichlet_bad = 0;
    for (const auto& s : tr.snapshots) dirichlet_bad += (s.u.front() != cplx{}) + (s.u.back() != cplx{});

    double conj_err = 0.0;
    o.t_end = 5.0;
    for (int tau : {0, 1}) {
        ModelParams a = cfg.model;
        a.tau = tau;
        a.zeta = 0.5;
        a.epsilon = 0.5;
        ModelParams b = a;
        b.zeta = -0.5;
        const Trajectory ta = evolve(a, cfg.data, g, o);
        const Trajectory tb = evolve(b, cfg.data, g, o);
        if (ta.snapshots.size() != tb.snapshots.size()) {
            conj_err = INFINITY;
            break;
        }
        if (ta.snapshots.empty()) conj_err = INFINITY;
        for (std::size_t k = 0; k < ta.snapshots.size(); ++k) {
            for (std::size_t i = 0; i < g.n; ++i) {
                conj_err = std::max(conj_err, std::abs(ta.snapshots[k].u[i] - std::conj(tb.snapshots[k].u[i])));
            }
        }
    }
    ok = ok && !tr.snapshots.empty() && dirichlet_bad == 0 && conj_err <= 1e-12;
    return {ok, fmt("T_est %.5f; h/2 %.5f (%.2f%%); safety/2 %.5f (%.2f%%); Dirichlet violations %zu over %zu "
                    "snapshots; zeta conjugation error %.1e",
                    base, fine, 100.0 * dh, half, 100.0 * ds, dirichlet_bad, tr.snapshots.size(), conj_err)};
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "blowlab_acceptance";
    fs::remove_all(out);
    fs::create_directories(out);

    int failures = 0;
    auto run = [&](int id, const char* name, double budget_s, const std::function<Outcome()>& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > budget_s) {
            o.pass = false;
            o.detail += fmt(" [over the %.0f s budget]", budget_s);
        }
        if (!o.pass) ++failures;
        std::printf("%s criterion %d %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
        std::fflush(stdout);
    };

    run(1, "ODE oracle", 2.0, ode_oracle_check);
    run(2, "cutoff suite", 30.0, cutoff_suite);
    run(3, "phi-mass bound", 5.0, phi_mass_check);
    run(4, "ODI round trip", 5.0, odi_round_trip);
    run(5, "inequality chain", 300.0, chain_check);

    SweepRun first, second;
    run(6, "sweep dominance", 1800.0, [&] {
        RunConfig cfg = parse(kHeatP15);
        cfg.out_dir = out / "sweep_p15";
        first = run_sweep(cfg);
        return sweep_check(first);
    });
    run(7, "p = 2 regime", 600.0, [&] { return p2_check(out / "sweep_p2"); });
    run(8, "solver quality", 600.0, solver_quality);
    run(9, "determinism", 1800.0, [&] {
        if (first.records.empty()) return Outcome{false, "first sweep missing"};
        RunConfig cfg = parse(kHeatP15);
        cfg.out_dir = out / "sweep_p15_repeat";
        second = run_sweep(cfg);
        return determinism_check(first, second);
    });

    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

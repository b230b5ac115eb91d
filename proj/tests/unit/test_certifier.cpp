#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "doctest.h"

#include "blowlab/certifier.hpp"
#include "blowlab/errors.hpp"
#include "blowlab/kernels.hpp"
#include "blowlab/quadrature.hpp"

using namespace blowlab;

namespace {

ModelParams heat(double p, double eps = 1.0) {
    ModelParams m;
    m.p = p;
    m.epsilon = eps;
    return m;
}

const InitialData kBump{RadialProfile::bump(1.25, 2.0), RadialProfile::zero()};

CertifierOptions quick() {
    CertifierOptions o;
    o.samples = 20000;
    return o;
}

// u(r, t) = (r - 1) e^{-t} sampled on [1, r_max] x [0, t_end]
Trajectory synthetic(double r_max, double h, double t_end, double dt, double amp = 1.0) {
    Trajectory tr;
    tr.grid = RadialGrid::with_spacing(r_max, h);
    tr.stop = StopReason::TimeLimit;
    for (double t = 0.0; t <= t_end + 1e-12; t += dt) {
        Snapshot s;
        s.t = t;
        s.u.resize(tr.grid.n);
        for (std::size_t i = 0; i < tr.grid.n; ++i) s.u[i] = amp * (tr.grid.r(i) - 1.0) * std::exp(-t);
        tr.snapshots.push_back(std::move(s));
    }
    tr.t_final = tr.snapshots.back().t;
    return tr;
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::Numerical;
}

}  // namespace

TEST_CASE("p = 2 certifies a double-exponential bound") {
    const auto rep = certify(heat(2.0, 0.5), kBump, quick());
    CHECK(rep.theta == 0.0);
    CHECK(rep.kappa == 1.0);
    CHECK(rep.bound.case_tag == odi::BoundCase::DoubleExp);
    CHECK(rep.display.inversion_shape.find("exp(exp(") != std::string::npos);
    CHECK(rep.bound.log_log_T > 0.0);
    CHECK_FALSE(rep.eps_constant.has_value());

    // small data: closed form with exp(exp(C / eps))
    const auto small = certify(heat(2.0, 0.001), kBump, quick());
    REQUIRE(small.delta < 0.1);
    REQUIRE(small.eps_constant.has_value());
    CHECK(*small.eps_constant / 0.001 >= small.bound.log_log_T * (1.0 - 1e-12));
}

TEST_CASE("p = 1.5 certifies an algebraic bound") {
    const auto rep = certify(heat(1.5, 0.05), kBump, quick());
    CHECK(rep.theta == doctest::Approx(1.0));
    CHECK(rep.kappa == 1.0);
    CHECK(rep.bound.case_tag == odi::BoundCase::Algebraic);
    CHECK(rep.display.inversion_log_exponent == doctest::Approx(1.0));
    CHECK(rep.display.theorem_log_exponent == doctest::Approx(0.5));
    CHECK(rep.display.eps_exponent == doctest::Approx(1.0));
    CHECK(std::isfinite(rep.bound.T_upper));
}

TEST_CASE("assembled constants follow their definitions") {
    ModelParams m = heat(1.5, 0.2);
    m.lambda = cplx{0.5, 0.5};
    const auto rep = certify(m, kBump, quick());
    const auto& c = rep.constants;
    CHECK(rep.C5 == doctest::Approx(2.0 * c.C3 + c.C4 + c.C1).epsilon(1e-14));
    CHECK(rep.delta == doctest::Approx(rep.angle.c0 * m.epsilon / std::cos(rep.angle.xi0)).epsilon(1e-14));
    CHECK(rep.C6 >= rep.C5 / (std::abs(m.lambda) * std::cos(rep.angle.xi0)));
    CHECK(rep.R0 >= std::exp(1.0));
    CHECK(rep.odi.delta == rep.delta);
    CHECK(rep.odi.C0 == rep.C6);

    ModelParams w = m;
    w.tau = 1;
    const auto rw = certify(w, InitialData{RadialProfile::bump(1.25, 2.0), RadialProfile::bump(1.5, 2.5)}, quick());
    CHECK(rw.C5 == doctest::Approx(2.0 * rw.constants.C3 + rw.constants.C4 + rw.constants.C2 / rw.R0 + rw.constants.C1)
                       .epsilon(1e-14));
}

TEST_CASE("doubling epsilon doubles delta and lowers the bound") {
    const auto a = certify(heat(1.5, 0.05), kBump, quick());
    const auto b = certify(heat(1.5, 0.1), kBump, quick());
    CHECK(b.delta == doctest::Approx(2.0 * a.delta).epsilon(1e-12));
    CHECK(b.bound.log_T < a.bound.log_T);
    CHECK(b.C6 == doctest::Approx(a.C6).epsilon(1e-12));
}

TEST_CASE("out-of-theorem exponents") {
    CHECK(kind_of([] { certify(heat(2.5), kBump, quick()); }) == ErrorKind::OutOfTheorem);
    ModelParams m = heat(1.9);
    m.weight = WeightMode::power(3);
    CHECK(kind_of([&] { certify(m, kBump, quick()); }) == ErrorKind::OutOfTheorem);
    m.p = 1.5;
    const auto rep = certify(m, kBump, quick());
    CHECK(rep.kappa == 0.0);
    CHECK(rep.theta == doctest::Approx(0.5));
}

TEST_CASE("inadmissible data are rejected") {
    const InitialData neg{RadialProfile::bump(1.25, 2.0, -1.0), RadialProfile::zero()};
    CHECK(kind_of([&] { certify(heat(1.5), neg, quick()); }) == ErrorKind::Admissibility);
}

TEST_CASE("certificate JSON carries the bound and both exponents") {
    const auto j = to_json(certify(heat(2.0, 0.5), kBump, quick()));
    CHECK(j.contains("bound"));
    CHECK(j["bound"]["case"] == "DoubleExp");
    CHECK(j["exponents"].contains("theorem_log_exponent"));
    CHECK(j["constants"]["C5"].get<double>() > 0.0);
}

TEST_CASE("zero field gives vanishing functionals and a vacuous chain") {
    Trajectory tr = synthetic(12.0, 0.05, 20.0, 0.5, 0.0);
    const ModelParams m = heat(1.5, 1.0);
    for (double R : {3.0, 10.0}) {
        const auto f = weighted_functionals(tr, m, R);
        CHECK(f.A == 0.0);
        CHECK(f.A_star == 0.0);
    }
    const auto cert = certify(m, kBump, quick());
    const double Rs[] = {cert.R0, 10.0};
    const auto chain = inequality_chain(tr, m, kBump, Rs, cert);
    CHECK_FALSE(chain.passed);
    for (const auto& row : chain.rows) {
        CHECK(row.lhs == doctest::Approx(cert.angle.c0 * m.epsilon));
        CHECK(row.rhs == 0.0);
        CHECK_FALSE(row.ok);
    }
    std::ostringstream os;
    write_chain_csv(os, chain);
    CHECK(os.str().find("slack") != std::string::npos);
}

TEST_CASE("functionals agree with a fine-grid oracle") {
    const double p = 1.5;
    const ModelParams m = heat(p);
    const CutoffSpec spec(p);
    const Trajectory tr = synthetic(12.0, 0.01, 12.0, 0.01);
    double prev = 0.0;
    for (double R : {3.0, 6.0, 10.0}) {
        CAPTURE(R);
        const auto f = weighted_functionals(tr, m, R);
        quad::PRIntegrand g;
        g.f = [&](double r, double t) {
            return std::pow((r - 1.0) * std::exp(-t), p) * std::log(r) * spec.psi_s(s_of(R, r, t));
        };
        g.t_breaks = [](double r, double R2, std::vector<double>& out) { out.push_back(0.5 * R2 - (r - 1.0) * (r - 1.0)); };
        g.r_breaks = {1.0 + std::sqrt(0.5 * R)};
        CHECK(f.A == doctest::Approx(quad::integrate_PR(g, R, 1e-9)).epsilon(0.01));
        CHECK(f.A_star <= f.A);
        CHECK(f.A > prev);
        prev = f.A;
    }
}

TEST_CASE("short trajectories raise InsufficientHorizon") {
    const Trajectory tr = synthetic(12.0, 0.05, 2.0, 0.1);
    CHECK(kind_of([&] { weighted_functionals(tr, heat(1.5), 5.0); }) == ErrorKind::InsufficientHorizon);
    Trajectory blown = tr;
    blown.stop = StopReason::Threshold;
    CHECK_NOTHROW(weighted_functionals(blown, heat(1.5), 5.0));
}

TEST_CASE("weight is discretely harmonic") {
    for (const WeightMode w : {WeightMode::log2d(), WeightMode::power(3)}) {
        for (double h : {0.02, 0.01}) {
            const RadialGrid g = RadialGrid::with_spacing(6.0, h);
            std::vector<cplx> u(g.n), lap(g.n);
            for (std::size_t i = 0; i < g.n; ++i) u[i] = w.phi(g.r(i));
            kernels::scalar_table().radial_laplacian(u, 1.0, h, w.dim, lap);
            double worst = 0.0;
            for (std::size_t i = 1; i + 1 < g.n; ++i) worst = std::max(worst, std::abs(lap[i]));
            CHECK(worst < 5.0 * h * h);
        }
    }
}

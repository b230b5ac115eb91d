#include "blowlab/odi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "blowlab/errors.hpp"
#include "blowlab/quadrature.hpp"

namespace blowlab::odi {
namespace {

constexpr double kLogMax = 709.0;
constexpr double kCaseTol = 1e-12;
constexpr double kRhoTol = 1e-13;

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

void check_common(const ODIParams& q) {
    if (!(q.C0 > 0.0) || !std::isfinite(q.C0)) throw Error(ErrorKind::Input, "C0 must be positive");
    if (!(q.p > 1.0) || !std::isfinite(q.p)) throw Error(ErrorKind::Input, "p must exceed 1");
    if (!(q.theta >= 0.0) || !std::isfinite(q.theta)) throw Error(ErrorKind::Input, "theta must be >= 0");
    if (!std::isfinite(q.kappa)) throw Error(ErrorKind::Input, "kappa must be finite");
    if (!(q.R1 > 1.0) || !std::isfinite(q.R1)) {
        throw Error(ErrorKind::Domain, "R1 must exceed 1 so that log R1 > 0");
    }
}

double rate(const ODIParams& q) { return q.theta * (q.p - 1.0); }
double log_power(const ODIParams& q) { return q.kappa * (q.p - 1.0); }

// theta = 0: with s = e^v the integrand becomes e^{(1 - kappa(p-1)) v}.
double rho_of_log_log_T(const ODIParams& q, double v) {
    const double v1 = std::log(std::log(q.R1));
    if (v < v1) throw Error(ErrorKind::Domain, "T below R1");
    const double c = 1.0 - log_power(q);
    return quad::integrate([c](double w) { return std::exp(c * w); }, v1, v, kRhoTol);
}

// Illinois false position on an increasing function with g(lo) < 0 <= g(hi).
template <class G>
double solve_increasing(G&& g, double lo, double hi, double glo, double ghi, double scale) {
    int side = 0;
    for (int it = 0; it < 300; ++it) {
        const double x = (glo * hi - ghi * lo) / (glo - ghi);
        const double mid = 0.5 * (lo + hi);
        const double cand = (x > lo && x < hi) ? x : mid;
        const double gc = g(cand);
        if (gc == 0.0) return cand;
        if (gc < 0.0) {
            lo = cand;
            glo = gc;
            if (side == -1) ghi *= 0.5;
            side = -1;
        } else {
            hi = cand;
            ghi = gc;
            if (side == 1) glo *= 0.5;
            side = 1;
        }
        if (hi - lo <= 1e-14 * std::max(1.0, std::abs(cand)) || std::abs(gc) <= 1e-14 * scale) return cand;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

void ODIParams::validate() const {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw Error(ErrorKind::Input, "delta must be positive");
    check_common(*this);
    (void)classify(*this);
}

const char* to_string(BoundCase c) {
    switch (c) {
        case BoundCase::Algebraic: return "Algebraic";
        case BoundCase::SingleExp: return "SingleExp";
        case BoundCase::DoubleExp: return "DoubleExp";
    }
    return "?";
}

bool ODIBound::finite() const { return std::isfinite(log_log_T) || std::isfinite(log_T); }

BoundCase classify(const ODIParams& q) {
    if (q.theta > 0.0) return BoundCase::Algebraic;
    const double b = log_power(q);
    if (std::abs(b - 1.0) <= kCaseTol) return BoundCase::DoubleExp;
    if (b < 1.0) return BoundCase::SingleExp;
    throw Error(ErrorKind::NoFiniteBound,
                "no finite bound derivable: theta = 0 and kappa > 1/(p-1) make rho_T bounded");
}

double rho_of_log_T(const ODIParams& q, double log_T) {
    check_common(q);
    const double x1 = std::log(q.R1);
    if (log_T < x1) throw Error(ErrorKind::Domain, "rho_T needs T >= R1");
    if (log_T == x1) return 0.0;
    const double a = rate(q);
    const double b = log_power(q);
    if (a == 0.0) return rho_of_log_log_T(q, std::log(log_T));
    auto integrand = [a, b](double s) { return std::exp(a * s) * std::pow(s, -b); };
    // Pieces of width ~1/a keep the exponential resolved at every scale.
    const double span = log_T - x1;
    const auto pieces = static_cast<int>(std::min(512.0, std::ceil(a * span)));
    std::vector<double> breaks;
    for (int k = 1; k < pieces; ++k) breaks.push_back(x1 + span * k / pieces);
    return quad::integrate(integrand, x1, log_T, kRhoTol, breaks);
}

double rho_of_T(const ODIParams& q, double T) {
    check_common(q);
    if (T == q.R1) return 0.0;
    if (!(T > q.R1)) throw Error(ErrorKind::Domain, "rho_T needs T >= R1");
    return rho_of_log_T(q, std::log(T));
}

double budget(const ODIParams& q) {
    const double log_b = std::log(std::numbers::ln2 / (q.p - 1.0)) + q.p * std::log(q.C0) - (q.p - 1.0) * std::log(q.delta);
    return std::exp(log_b);
}

ODIBound lifespan_bound_numeric(const ODIParams& q) {
    q.validate();
    ODIBound out;
    out.case_tag = classify(q);
    out.budget = budget(q);
    const double B = out.budget;
    if (!std::isfinite(B)) throw Error(ErrorKind::Numerical, "budget overflows double range");
    const double x1 = std::log(q.R1);

    if (out.case_tag == BoundCase::Algebraic) {
        double x = x1;
        if (B > 0.0) {
            auto g = [&](double y) { return rho_of_log_T(q, y) - B; };
            double step = 1.0 / rate(q);
            double hi = x1 + step;
            double ghi = g(hi);
            for (int k = 0; ghi < 0.0; ++k) {
                if (k > 200) throw Error(ErrorKind::Numerical, "could not bracket rho_T = budget");
                step *= 2.0;
                hi = x1 + step;
                ghi = g(hi);
            }
            x = solve_increasing(g, x1, hi, -B, ghi, B);
        }
        out.log_T = x;
        out.log_log_T = std::log(x);
    } else {
        const double v1 = std::log(x1);
        double v = v1;
        if (B > 0.0) {
            auto g = [&](double w) { return rho_of_log_log_T(q, w) - B; };
            double step = 1.0;
            double hi = v1 + step;
            double ghi = g(hi);
            for (int k = 0; ghi < 0.0; ++k) {
                if (k > 200) throw Error(ErrorKind::Numerical, "could not bracket rho_T = budget");
                step *= 2.0;
                hi = v1 + step;
                ghi = g(hi);
            }
            v = solve_increasing(g, v1, hi, -B, ghi, B);
        }
        out.log_log_T = v;
        out.log_T = v < kLogMax ? std::exp(v) : std::numeric_limits<double>::infinity();
    }
    out.T_upper = out.log_T < kLogMax ? std::exp(out.log_T) : std::numeric_limits<double>::infinity();
    if (std::isfinite(out.T_upper)) {
        out.symbolic = fmt("%.10g", out.T_upper);
    } else if (std::isfinite(out.log_T)) {
        out.symbolic = "exp(" + fmt("%.10g", out.log_T) + ")";
    } else {
        out.symbolic = "exp(exp(" + fmt("%.10g", out.log_log_T) + "))";
    }
    return out;
}

ODIBound ClosedForm::evaluate(double delta) const {
    ODIBound out;
    out.case_tag = case_tag;
    switch (case_tag) {
        case BoundCase::Algebraic: {
            const double li = std::log(1.0 / delta);
            out.log_T = C + delta_exponent * li + log_exponent * std::log(li);
            out.log_log_T = std::log(out.log_T);
            break;
        }
        case BoundCase::SingleExp:
            out.log_T = C * std::pow(delta, -delta_exponent);
            out.log_log_T = std::log(out.log_T);
            break;
        case BoundCase::DoubleExp:
            out.log_log_T = C * std::pow(delta, -delta_exponent);
            out.log_T = out.log_log_T < kLogMax ? std::exp(out.log_log_T) : std::numeric_limits<double>::infinity();
            break;
    }
    out.T_upper = out.log_T < kLogMax ? std::exp(out.log_T) : std::numeric_limits<double>::infinity();
    out.symbolic = shape();
    return out;
}

std::string ClosedForm::shape() const {
    switch (case_tag) {
        case BoundCase::Algebraic:
            return fmt("%.6g", std::exp(C)) + " * delta^-" + fmt("%.6g", delta_exponent) + " * log(1/delta)^" +
                   fmt("%.6g", log_exponent);
        case BoundCase::SingleExp:
            return "exp(" + fmt("%.6g", C) + " * delta^-" + fmt("%.6g", delta_exponent) + ")";
        case BoundCase::DoubleExp:
            return "exp(exp(" + fmt("%.6g", C) + " * delta^-" + fmt("%.6g", delta_exponent) + "))";
    }
    return {};
}

ClosedForm calibrate_closed_form(const ODIParams& params, double delta0, double delta_lo, std::size_t grid) {
    if (!(delta0 > delta_lo && delta_lo > 0.0 && delta0 < 1.0)) {
        throw Error(ErrorKind::Input, "closed-form calibration needs 0 < delta_lo < delta0 < 1");
    }
    grid = std::max<std::size_t>(grid, 2);
    ClosedForm cf;
    cf.case_tag = classify(params);
    cf.delta0 = delta0;
    const double b = log_power(params);
    switch (cf.case_tag) {
        case BoundCase::Algebraic:
            cf.delta_exponent = 1.0 / params.theta;
            cf.log_exponent = params.kappa / params.theta;
            break;
        case BoundCase::SingleExp:
            cf.delta_exponent = (params.p - 1.0) / (1.0 - b);
            break;
        case BoundCase::DoubleExp:
            cf.delta_exponent = params.p - 1.0;
            break;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid; ++i) {
        ODIParams q = params;
        const double f = static_cast<double>(i) / static_cast<double>(grid - 1);
        q.delta = std::exp(std::log(delta_lo) + f * (std::log(delta0) - std::log(delta_lo)));
        const ODIBound nb = lifespan_bound_numeric(q);
        double c = 0.0;
        switch (cf.case_tag) {
            case BoundCase::Algebraic: {
                const double li = std::log(1.0 / q.delta);
                c = nb.log_T - cf.delta_exponent * li - cf.log_exponent * std::log(li);
                break;
            }
            case BoundCase::SingleExp:
                c = nb.log_T * std::pow(q.delta, cf.delta_exponent);
                break;
            case BoundCase::DoubleExp:
                c = nb.log_log_T * std::pow(q.delta, cf.delta_exponent);
                break;
        }
        best = std::max(best, c);
    }
    cf.C = cf.case_tag == BoundCase::Algebraic ? best + 1e-9 : best * (1.0 + 1e-9) + 1e-300;
    return cf;
}

ODIBound lifespan_bound_closed_form(const ODIParams& params, double delta0) {
    params.validate();
    if (!(params.delta < delta0)) throw Error(ErrorKind::Input, "closed form applies only for delta < delta0");
    const ClosedForm cf = calibrate_closed_form(params, delta0);
    ODIBound out = cf.evaluate(params.delta);
    out.budget = budget(params);
    return out;
}

CriterionReport verify_criterion(std::span<const FunctionalSample> samples, const ODIParams& q) {
    check_common(q);
    if (!(q.delta >= 0.0)) throw Error(ErrorKind::Input, "delta must be >= 0");
    CriterionReport rep;
    rep.passed = true;
    const double pc = q.p / (q.p - 1.0);
    for (const auto& s : samples) {
        if (s.A < 0.0 || s.A_star < 0.0) throw Error(ErrorKind::Input, "criterion functionals must be nonnegative");
        if (!(s.R > 1.0)) throw Error(ErrorKind::Domain, "criterion needs R > 1");
        const double factor = std::pow(s.R, -q.theta / pc) * std::pow(std::log(s.R), q.kappa / pc) *
                              std::pow(s.A_star, 1.0 / q.p);
        CriterionRow row;
        row.R = s.R;
        row.lhs = q.delta + s.A;
        row.rhs = q.C0 * factor;
        row.residual = row.rhs - row.lhs;
        row.ok = row.lhs <= row.rhs;
        rep.passed = rep.passed && row.ok;
        double need = 0.0;
        if (row.lhs > 0.0) need = factor > 0.0 ? row.lhs / factor : std::numeric_limits<double>::infinity();
        rep.min_C0 = std::max(rep.min_C0, need);
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace blowlab::odi

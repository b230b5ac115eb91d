#include "blowlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "blowlab/errors.hpp"
#include "blowlab/kernels.hpp"

namespace blowlab::quad {
namespace {

constexpr unsigned kMaxDepth = 18;

// Sorted, deduplicated interior points of (a, b), bracketed by a and b.
std::vector<double> partition(double a, double b, std::span<const double> breaks) {
    std::vector<double> pts{a};
    for (double x : breaks) {
        if (x > a && x < b) pts.push_back(x);
    }
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

template <class F>
auto gk_piece(F&& f, double a, double b, double rel_tol, double abs_tol) {
    using boost::math::quadrature::gauss_kronrod;
    // Integrate on [-1, 1]: the rule's error floor scales with |integrand|,
    // not with the interval length.
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    auto g = [&](double x) { return f(mid + half * x) * half; };
    double err = 0.0;
    double l1 = 0.0;
    if (abs_tol > 0.0) {
        // A piece far below the absolute tolerance is accepted as is; otherwise
        // the absolute target becomes a relative one for the adaptive rule.
        auto coarse = gauss_kronrod<double, 15>::integrate(g, -1.0, 1.0, 0, 0.0, &err, &l1);
        if (std::isfinite(std::abs(coarse)) && l1 + err <= 0.1 * abs_tol) return coarse;
        if (l1 > 0.0) rel_tol = std::max(rel_tol, abs_tol / l1);
    }
    auto value = gauss_kronrod<double, 15>::integrate(g, -1.0, 1.0, kMaxDepth, rel_tol, &err, &l1);
    const double scale = std::max(l1, std::abs(value));
    const double allowed = std::max(10.0 * std::max(rel_tol, 1e-14) * scale, 10.0 * abs_tol);
    // Deep recursion sums rounding noise into the estimate; a shallower
    // subdivision may resolve the piece with a smaller error.
    for (unsigned depth : {10u, 6u, 3u}) {
        if (!(err > allowed)) break;
        double e2 = 0.0, l2 = 0.0;
        const auto v2 = gauss_kronrod<double, 15>::integrate(g, -1.0, 1.0, depth, rel_tol, &e2, &l2);
        if (e2 < err) {
            value = v2;
            err = e2;
        }
    }
    if (!std::isfinite(std::abs(value)) || err > allowed + 1e-300) {
        throw QuadratureError("adaptive quadrature did not converge on [" + std::to_string(a) + ", " +
                                  std::to_string(b) + "]",
                              std::abs(value), err);
    }
    return value;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 std::span<const double> breaks, double abs_tol) {
    if (!(b > a)) return 0.0;
    const auto pts = partition(a, b, breaks);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) sum += gk_piece(f, pts[i], pts[i + 1], rel_tol, abs_tol);
    return sum;
}

std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f, double a, double b,
                                       double rel_tol, std::span<const double> breaks, double abs_tol) {
    if (!(b > a)) return 0.0;
    const auto pts = partition(a, b, breaks);
    std::complex<double> sum{};
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) sum += gk_piece(f, pts[i], pts[i + 1], rel_tol, abs_tol);
    return sum;
}

double integrate_PR(const PRIntegrand& f, double R, double tol, const WeightMode& mode) {
    if (!(R > 0.0)) throw Error(ErrorKind::Domain, "integrate_PR needs R > 0");
    const double r_top = 1.0 + std::sqrt(R);

    // Coarse scan for the integrand's scale; it only sets the absolute
    // tolerance below which inner integrals are not refined further.
    double fmax = 0.0;
    constexpr int kScan = 24;
    for (int i = 0; i <= kScan; ++i) {
        const double r = 1.0 + (r_top - 1.0) * (i + 0.5) / (kScan + 1.0);
        const double t_top = R - (r - 1.0) * (r - 1.0);
        for (int k = 0; k <= kScan; ++k) {
            const double v = std::abs(f.f(r, t_top * (k + 0.5) / (kScan + 1.0)));
            if (std::isfinite(v)) fmax = std::max(fmax, v);
        }
    }
    const double inner_abs = 1e-3 * tol * fmax * R;

    std::vector<double> tb;
    auto inner = [&](double r) {
        const double t_top = R - (r - 1.0) * (r - 1.0);
        if (!(t_top > 0.0)) return 0.0;
        tb.clear();
        if (f.t_breaks) f.t_breaks(r, R, tb);
        auto g = [&](double t) { return f.f(r, t); };
        const std::vector<double> local = tb;
        return integrate(g, 0.0, t_top, tol * 0.1, local, inner_abs) * mode.measure(r);
    };
    const double outer_abs = inner_abs * mode.measure(r_top) * (r_top - 1.0);
    return integrate(inner, 1.0, r_top, tol, f.r_breaks, outer_abs);
}

double phi_mass(double R, const WeightMode& mode, double tol) {
    PRIntegrand f;
    f.f = [&mode](double r, double) { return mode.phi(r); };
    return integrate_PR(f, R, tol, mode);
}

double phi_mass_bound(double R, const WeightMode& mode) {
    const double s = std::sqrt(R) + 1.0;
    if (mode.kind == WeightKind::Log2D) return std::numbers::pi * R * s * s * std::log(s);
    return R * mode.sphere_area() * std::pow(s, mode.dim) / mode.dim;
}

double integrate_PR_sampled(const SampledField& field, const std::function<double(double r, double t)>& weight,
                            const std::function<void(double t, std::vector<double>& out)>& r_breaks, double R,
                            const WeightMode& mode) {
    if (!(R > 0.0)) throw Error(ErrorKind::Domain, "integrate_PR_sampled needs R > 0");
    if (field.n < 2 || !(field.h > 0.0)) throw Error(ErrorKind::Input, "sampled field needs >= 2 nodes");
    static const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

    const auto& kern = kernels::active();
    const double r_last = field.r0 + field.h * static_cast<double>(field.n - 1);
    std::vector<double> omega(field.n);
    std::vector<double> brk;
    std::vector<double> pieces;

    std::vector<double> ts;
    std::vector<double> js;
    for (std::size_t lev = 0; lev < field.times.size(); ++lev) {
        const double t = field.times[lev];
        if (!(t < R)) break;
        const double r_end = std::min(1.0 + std::sqrt(R - t), r_last);
        brk.clear();
        if (r_breaks) r_breaks(t, brk);

        const auto last_cell = std::min<std::size_t>(
            field.n - 2, static_cast<std::size_t>(std::floor((r_end - field.r0) / field.h)));
        std::fill(omega.begin(), omega.begin() + static_cast<std::ptrdiff_t>(last_cell + 2), 0.0);
        for (std::size_t j = 0; j <= last_cell; ++j) {
            const double xa = field.r0 + field.h * static_cast<double>(j);
            const double xb = std::min(xa + field.h, r_end);
            if (!(xb > xa)) break;
            pieces.assign({xa});
            for (double x : brk) {
                if (x > xa && x < xb) pieces.push_back(x);
            }
            pieces.push_back(xb);
            std::sort(pieces.begin(), pieces.end());
            for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
                const double mid = 0.5 * (pieces[k] + pieces[k + 1]);
                const double half = 0.5 * (pieces[k + 1] - pieces[k]);
                for (int q = 0; q < 3; ++q) {
                    const double x = mid + half * gx[q];
                    const double th = (x - xa) / field.h;
                    const double wq = gw[q] * half * weight(x, t) * mode.measure(x);
                    omega[j] += wq * (1.0 - th);
                    omega[j + 1] += wq * th;
                }
            }
        }
        const auto row = field.row(lev);
        const std::size_t len = last_cell + 2;
        ts.push_back(t);
        js.push_back(kern.dot(std::span<const double>(omega.data(), len), row.subspan(0, len)));
    }
    if (ts.empty()) return 0.0;
    if (field.times.size() > ts.size() || field.times.back() >= R) {
        // The level t = R of P(R) is the single point r = 1.
        ts.push_back(R);
        js.push_back(0.0);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) sum += 0.5 * (ts[i + 1] - ts[i]) * (js[i] + js[i + 1]);
    return sum;
}

}  // namespace blowlab::quad

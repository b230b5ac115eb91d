#include "blowlab/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace blowlab::kernels {
namespace {

void abs_pow_scalar(std::span<const cplx> u, double p, std::span<double> out) {
    for (std::size_t i = 0; i < u.size(); ++i) {
        out[i] = std::pow(std::abs(u[i]), p);
    }
}

void axpy_scalar(std::span<const cplx> u, cplx scale, std::span<const double> w,
                 std::span<cplx> out) {
    for (std::size_t i = 0; i < u.size(); ++i) {
        out[i] = u[i] + scale * w[i];
    }
}

void laplacian_scalar(std::span<const cplx> u, double r0, double h, double dim,
                      std::span<cplx> out) {
    const std::size_t n = u.size();
    if (n == 0) return;
    const double inv_h2 = 1.0 / (h * h);
    const double inv_2h = 0.5 / h;
    out[0] = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double r = r0 + static_cast<double>(i) * h;
        const double drift = (dim - 1.0) / r;
        out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_h2 +
                 drift * (u[i + 1] - u[i - 1]) * inv_2h;
    }
    out[n - 1] = 0.0;
}

double max_abs_scalar(std::span<const cplx> u) {
    double m = 0.0;
    for (const auto& z : u) m = std::max(m, std::abs(z));
    return m;
}

double dot_scalar(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{
        "scalar", abs_pow_scalar, axpy_scalar, laplacian_scalar, max_abs_scalar, dot_scalar,
    };
    return table;
}

}  // namespace blowlab::kernels

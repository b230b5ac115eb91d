#pragma once

// Data-parallel inner loops used by the solver and the trajectory
// quadrature. Every kernel has a portable scalar reference and, on x86-64,
// an AVX2/FMA variant. The variant is chosen once at first use from the
// running CPU; BLOWLAB_KERNELS=scalar forces the reference path.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace blowlab::kernels {

using cplx = std::complex<double>;

struct KernelTable {
    std::string_view name;

    /// out[i] = |u[i]|^p
    void (*abs_pow)(std::span<const cplx> u, double p, std::span<double> out);

    /// out[i] = u[i] + scale * w[i]   (complex scale, real weights)
    void (*axpy_real_weight)(std::span<const cplx> u, cplx scale,
                             std::span<const double> w, std::span<cplx> out);

    /// Radial Laplacian u'' + (dim-1)/r u' with second-order centred
    /// differences on the uniform grid r_i = r0 + i h. The two end entries
    /// of out are set to zero.
    void (*radial_laplacian)(std::span<const cplx> u, double r0, double h,
                             double dim, std::span<cplx> out);

    /// max_i |u[i]|
    double (*max_abs)(std::span<const cplx> u);

    /// sum_i a[i] * b[i]
    double (*dot)(std::span<const double> a, std::span<const double> b);
};

const KernelTable& scalar_table();

/// nullptr when the AVX2 variant is not compiled in.
const KernelTable* avx2_table();

bool cpu_has_avx2();

/// Table selected for this process.
const KernelTable& active();

}  // namespace blowlab::kernels

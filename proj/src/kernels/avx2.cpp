// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include "blowlab/kernels.hpp"

#include <algorithm>
#include <cmath>

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace blowlab::kernels {
namespace {

inline const double* as_doubles(const cplx* z) { return reinterpret_cast<const double*>(z); }
inline double* as_doubles(cplx* z) { return reinterpret_cast<double*>(z); }

// |z0|^2..|z3|^2 from two registers holding (z0, z1) and (z2, z3).
inline __m256d modulus_sq4(__m256d a, __m256d b) {
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
    return _mm256_permute4x64_pd(h, _MM_SHUFFLE(3, 1, 2, 0));
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void abs_pow_avx2(std::span<const cplx> u, double p, std::span<double> out) {
    const std::size_t n = u.size();
    const double* src = as_doubles(u.data());
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d q = modulus_sq4(_mm256_loadu_pd(src + 2 * i), _mm256_loadu_pd(src + 2 * i + 4));
        __m256d r;
        if (p == 2.0) {
            r = q;
        } else if (p == 1.5) {
            const __m256d m = _mm256_sqrt_pd(q);
            r = _mm256_mul_pd(m, _mm256_sqrt_pd(m));
        } else if (p == 3.0) {
            r = _mm256_mul_pd(q, _mm256_sqrt_pd(q));
        } else if (p == 1.0) {
            r = _mm256_sqrt_pd(q);
        } else {
            alignas(32) double m[4];
            _mm256_store_pd(m, _mm256_sqrt_pd(q));
            for (double& v : m) v = std::pow(v, p);
            r = _mm256_load_pd(m);
        }
        _mm256_storeu_pd(out.data() + i, r);
    }
    for (; i < n; ++i) out[i] = std::pow(std::abs(u[i]), p);
}

void axpy_avx2(std::span<const cplx> u, cplx scale, std::span<const double> w, std::span<cplx> out) {
    const std::size_t n = u.size();
    const double* src = as_doubles(u.data());
    double* dst = as_doubles(out.data());
    const __m256d s = _mm256_setr_pd(scale.real(), scale.imag(), scale.real(), scale.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m128d w2 = _mm_loadu_pd(w.data() + i);
        const __m256d wd = _mm256_permute4x64_pd(_mm256_castpd128_pd256(w2), _MM_SHUFFLE(1, 1, 0, 0));
        _mm256_storeu_pd(dst + 2 * i, _mm256_fmadd_pd(s, wd, _mm256_loadu_pd(src + 2 * i)));
    }
    for (; i < n; ++i) out[i] = u[i] + scale * w[i];
}

void laplacian_avx2(std::span<const cplx> u, double r0, double h, double dim, std::span<cplx> out) {
    const std::size_t n = u.size();
    if (n == 0) return;
    out[0] = 0.0;
    if (n < 3) {
        out[n - 1] = 0.0;
        return;
    }
    const double inv_h2 = 1.0 / (h * h);
    const double inv_2h = 0.5 / h;
    const double* src = as_doubles(u.data());
    double* dst = as_doubles(out.data());
    const __m256d vh2 = _mm256_set1_pd(inv_h2);
    const __m256d v2h = _mm256_set1_pd(inv_2h);
    const __m256d vm2h2 = _mm256_set1_pd(-2.0 * inv_h2);
    const __m256d vr0 = _mm256_set1_pd(r0);
    const __m256d vh = _mm256_set1_pd(h);
    const __m256d vdim1 = _mm256_set1_pd(dim - 1.0);
    const __m256d lane = _mm256_setr_pd(0.0, 0.0, 1.0, 1.0);

    std::size_t i = 1;
    for (; i + 2 <= n - 1; i += 2) {
        const __m256d idx = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(i)), lane);
        const __m256d r = _mm256_fmadd_pd(idx, vh, vr0);
        const __m256d drift = _mm256_mul_pd(_mm256_div_pd(vdim1, r), v2h);
        const __m256d lo = _mm256_sub_pd(vh2, drift);
        const __m256d hi = _mm256_add_pd(vh2, drift);
        const __m256d um = _mm256_loadu_pd(src + 2 * (i - 1));
        const __m256d uc = _mm256_loadu_pd(src + 2 * i);
        const __m256d up = _mm256_loadu_pd(src + 2 * (i + 1));
        __m256d acc = _mm256_mul_pd(vm2h2, uc);
        acc = _mm256_fmadd_pd(lo, um, acc);
        acc = _mm256_fmadd_pd(hi, up, acc);
        _mm256_storeu_pd(dst + 2 * i, acc);
    }
    for (; i + 1 < n; ++i) {
        const double r = r0 + static_cast<double>(i) * h;
        const double drift = (dim - 1.0) / r;
        out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_h2 + drift * (u[i + 1] - u[i - 1]) * inv_2h;
    }
    out[n - 1] = 0.0;
}

double max_abs_avx2(std::span<const cplx> u) {
    const std::size_t n = u.size();
    const double* src = as_doubles(u.data());
    __m256d best = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        best = _mm256_max_pd(best, modulus_sq4(_mm256_loadu_pd(src + 2 * i), _mm256_loadu_pd(src + 2 * i + 4)));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, best);
    double m = std::sqrt(std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3])));
    for (; i < n; ++i) m = std::max(m, std::abs(u[i]));
    return m;
}

double dot_avx2(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i + 4), _mm256_loadu_pd(b.data() + i + 4), acc1);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

const KernelTable* avx2_table() {
    static const KernelTable table{
        "avx2", abs_pow_avx2, axpy_avx2, laplacian_avx2, max_abs_avx2, dot_avx2,
    };
    return &table;
}

}  // namespace blowlab::kernels

#else

namespace blowlab::kernels {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace blowlab::kernels

#endif

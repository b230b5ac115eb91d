#include <cmath>
#include <cstdlib>
#include <random>
#include <string_view>
#include <vector>

#include "doctest.h"

#include "blowlab/kernels.hpp"

using namespace blowlab::kernels;

namespace {

std::vector<cplx> random_field(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    std::vector<cplx> u(n);
    for (auto& z : u) z = {d(rng), d(rng)};
    return u;
}

std::vector<double> random_real(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 31, 64, 1001};

}  // namespace

TEST_CASE("scalar abs_pow matches std::pow") {
    const auto u = random_field(100, 1);
    std::vector<double> out(u.size());
    for (double p : {1.0, 1.5, 2.0, 2.7, 3.0}) {
        scalar_table().abs_pow(u, p, out);
        for (std::size_t i = 0; i < u.size(); ++i) CHECK(out[i] == doctest::Approx(std::pow(std::abs(u[i]), p)).epsilon(1e-14));
    }
}

TEST_CASE("scalar radial laplacian is exact on quadratics") {
    // u = r^2: u'' + (dim-1)/r u' = 2 + 2(dim-1) = 2 dim
    const std::size_t n = 50;
    const double r0 = 1.0, h = 0.1;
    std::vector<cplx> u(n), out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = r0 + h * static_cast<double>(i);
        u[i] = {r * r, -r * r};
    }
    for (double dim : {2.0, 3.0, 5.0}) {
        scalar_table().radial_laplacian(u, r0, h, dim, out);
        CHECK(out.front() == cplx{});
        CHECK(out.back() == cplx{});
        for (std::size_t i = 1; i + 1 < n; ++i) {
            CHECK(out[i].real() == doctest::Approx(2.0 * dim).epsilon(1e-10));
            CHECK(out[i].imag() == doctest::Approx(-2.0 * dim).epsilon(1e-10));
        }
    }
}

TEST_CASE("active table honours the override") {
    const auto& k = active();
    const char* env = std::getenv("BLOWLAB_KERNELS");
    if (env && std::string_view(env) == "scalar") {
        CHECK(k.name == "scalar");
    } else if (avx2_table() && cpu_has_avx2()) {
        CHECK(k.name == "avx2");
    } else {
        CHECK(k.name == "scalar");
    }
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
    const KernelTable* simd = avx2_table();
    if (!simd || !cpu_has_avx2()) {
        MESSAGE("AVX2 variant unavailable; equivalence not exercised");
        return;
    }
    const KernelTable& ref = scalar_table();
    for (std::size_t n : kSizes) {
        CAPTURE(n);
        const auto u = random_field(n, 10 + n);
        const auto w = random_real(n, 20 + n);
        const auto w2 = random_real(n, 30 + n);

        for (double p : {1.0, 1.5, 2.0, 3.0, 1.3, 2.5}) {
            CAPTURE(p);
            std::vector<double> a(n), b(n);
            ref.abs_pow(u, p, a);
            simd->abs_pow(u, p, b);
            for (std::size_t i = 0; i < n; ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-14));
        }

        const cplx scale{0.3, -1.7};
        std::vector<cplx> a(n), b(n);
        ref.axpy_real_weight(u, scale, w, a);
        simd->axpy_real_weight(u, scale, w, b);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(a[i] - b[i]) <= 1e-14 * (1.0 + std::abs(a[i])));
        }

        if (n >= 3) {
            for (double dim : {2.0, 3.0}) {
                ref.radial_laplacian(u, 1.0, 0.01, dim, a);
                simd->radial_laplacian(u, 1.0, 0.01, dim, b);
                for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12 * (1.0 + std::abs(a[i])));
            }
        }

        CHECK(simd->max_abs(u) == doctest::Approx(ref.max_abs(u)).epsilon(1e-15));

        double l1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) l1 += std::abs(w[i] * w2[i]);
        CHECK(std::abs(simd->dot(w, w2) - ref.dot(w, w2)) <= 1e-14 * (1.0 + l1));
    }
}

TEST_CASE("max_abs of an empty span is zero") {
    const std::vector<cplx> empty;
    CHECK(scalar_table().max_abs(empty) == 0.0);
    CHECK(active().max_abs(empty) == 0.0);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <vector>

#include "darboux/kernels.hpp"

using namespace darboux;

namespace {

std::mt19937_64 rng(20240817);

cplx rand_cplx() {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    return {d(rng), d(rng)};
}

struct Batch {
    std::vector<cplx> coeff, pts, f1, f2, g1, g2;
    std::vector<double> w;
};

Batch make_batch(size_t ncoeff, size_t n) {
    Batch b;
    std::uniform_real_distribution<double> d(0.0, 1.0);
    for (size_t k = 0; k < ncoeff; ++k) b.coeff.push_back(rand_cplx());
    for (size_t i = 0; i < n; ++i) {
        b.pts.push_back(0.8 * rand_cplx());
        b.f1.push_back(rand_cplx());
        b.f2.push_back(rand_cplx());
        b.g1.push_back(rand_cplx());
        b.g2.push_back(rand_cplx());
        b.w.push_back(d(rng));
    }
    return b;
}

}  // namespace

// The SIMD variants must agree with the scalar reference on random batches,
// including odd lengths that exercise the tail path.
TEST_CASE("scalar and dispatched kernels agree") {
    const auto& act = kernels::active();
    INFO("backend: ", act.backend);
    for (size_t n : {0ul, 1ul, 2ul, 3ul, 7ul, 64ul, 129ul}) {
        Batch b = make_batch(33, n);
        std::vector<cplx> out_s(n), out_a(n);
        kernels::scalar::horner_many(b.coeff.data(), b.coeff.size(), b.pts.data(), out_s.data(), n);
        act.horner_many(b.coeff.data(), b.coeff.size(), b.pts.data(), out_a.data(), n);
        for (size_t i = 0; i < n; ++i) CHECK(std::abs(out_s[i] - out_a[i]) < 1e-12 * (1.0 + std::abs(out_s[i])));

        double s1 = kernels::scalar::weighted_abs2(b.f1.data(), b.w.data(), n);
        double s2 = act.weighted_abs2(b.f1.data(), b.w.data(), n);
        CHECK(std::abs(s1 - s2) < 1e-12 * (1.0 + std::abs(s1)));

        cplx d1 = kernels::scalar::weighted_dot(b.f1.data(), b.f2.data(), b.w.data(), n);
        cplx d2 = act.weighted_dot(b.f1.data(), b.f2.data(), b.w.data(), n);
        CHECK(std::abs(d1 - d2) < 1e-12 * (1.0 + std::abs(d1)));

        Mat2 C{{rand_cplx(), rand_cplx(), rand_cplx(), rand_cplx()}};
        std::vector<cplx> p1(n), p2(n);
        kernels::scalar::pair_form(C, b.f1.data(), b.f2.data(), b.g1.data(), b.g2.data(), p1.data(), n);
        act.pair_form(C, b.f1.data(), b.f2.data(), b.g1.data(), b.g2.data(), p2.data(), n);
        for (size_t i = 0; i < n; ++i) CHECK(std::abs(p1[i] - p2[i]) < 1e-13);
    }
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 variants agree with scalar when supported") {
    if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) return;
    Batch b = make_batch(57, 101);
    const size_t n = b.pts.size();
    std::vector<cplx> out_s(n), out_v(n);
    kernels::scalar::horner_many(b.coeff.data(), b.coeff.size(), b.pts.data(), out_s.data(), n);
    kernels::avx2::horner_many(b.coeff.data(), b.coeff.size(), b.pts.data(), out_v.data(), n);
    for (size_t i = 0; i < n; ++i) CHECK(std::abs(out_s[i] - out_v[i]) < 1e-12 * (1.0 + std::abs(out_s[i])));

    CHECK(std::abs(kernels::scalar::weighted_abs2(b.f1.data(), b.w.data(), n) -
                   kernels::avx2::weighted_abs2(b.f1.data(), b.w.data(), n)) < 1e-12);
    cplx d1 = kernels::scalar::weighted_dot(b.f1.data(), b.f2.data(), b.w.data(), n);
    cplx d2 = kernels::avx2::weighted_dot(b.f1.data(), b.f2.data(), b.w.data(), n);
    CHECK(std::abs(d1 - d2) < 1e-12);
}
#endif

TEST_CASE("horner evaluates polynomials") {
    std::vector<cplx> coeff{cplx(1), cplx(-2), cplx(0, 3)};
    std::vector<cplx> pts{cplx(0.5), cplx(0, 1)};
    std::vector<cplx> out(2);
    kernels::active().horner_many(coeff.data(), 3, pts.data(), out.data(), 2);
    for (int i = 0; i < 2; ++i) {
        cplx z = pts[i];
        CHECK(std::abs(out[i] - (coeff[0] + coeff[1] * z + coeff[2] * z * z)) < 1e-14);
    }
}

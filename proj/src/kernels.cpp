#include "darboux/kernels.hpp"

#include <cstdlib>
#include <mutex>

namespace darboux::kernels {

namespace scalar {

void horner_many(const cplx* coeff, std::size_t ncoeff, const cplx* pts, cplx* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        cplx z = pts[i], v(0);
        for (std::size_t k = ncoeff; k-- > 0;) v = v * z + coeff[k];
        out[i] = v;
    }
}

double weighted_abs2(const cplx* v, const double* w, std::size_t n) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * (v[i].real() * v[i].real() + v[i].imag() * v[i].imag());
    return s;
}

cplx weighted_dot(const cplx* a, const cplx* b, const double* w, std::size_t n) {
    double re = 0, im = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag(), br = b[i].real(), bi = b[i].imag();
        re += w[i] * (ar * br + ai * bi);
        im += w[i] * (ai * br - ar * bi);
    }
    return {re, im};
}

void pair_form(const Mat2& C, const cplx* f1, const cplx* f2, const cplx* g1, const cplx* g2,
               cplx* out, std::size_t n) {
    const cplx c00 = C(0, 0), c01 = C(0, 1), c10 = C(1, 0), c11 = C(1, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx h1 = std::conj(g1[i]), h2 = std::conj(g2[i]);
        out[i] = f1[i] * (c00 * h1 + c01 * h2) + f2[i] * (c10 * h1 + c11 * h2);
    }
}

}  // namespace scalar

namespace {

Dispatch make_dispatch() {
    Dispatch d{scalar::horner_many, scalar::weighted_abs2, scalar::weighted_dot,
               scalar::pair_form, "scalar"};
#if defined(__x86_64__) || defined(_M_X64)
    const char* off = std::getenv("DARBOUX_NO_AVX2");
    bool forced_off = off && off[0] == '1';
    if (!forced_off && __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        d = Dispatch{avx2::horner_many, avx2::weighted_abs2, avx2::weighted_dot,
                     avx2::pair_form, "avx2"};
    }
#endif
    return d;
}

}  // namespace

const Dispatch& active() {
    static Dispatch d = make_dispatch();
    return d;
}

}  // namespace darboux::kernels

// AVX2 variants of the batch kernels. Compiled with -mavx2 -mfma in its own TU;
// only reached through the runtime dispatcher.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "darboux/kernels.hpp"

namespace darboux::kernels::avx2 {

namespace {

// Two interleaved complex doubles per __m256d: [re0, im0, re1, im1].
inline __m256d cmul(__m256d x, __m256d y) {
    __m256d y_re = _mm256_movedup_pd(y);
    __m256d y_im = _mm256_permute_pd(y, 0xF);
    __m256d x_sw = _mm256_permute_pd(x, 0x5);
    return _mm256_fmaddsub_pd(x, y_re, _mm256_mul_pd(x_sw, y_im));
}

inline __m256d broadcast_cplx(const cplx& c) {
    return _mm256_broadcast_pd(reinterpret_cast<const __m128d*>(&c));
}

// [w0, w0, w1, w1] from two consecutive weights.
inline __m256d widen_weights(const double* w) {
    __m256d v = _mm256_castpd128_pd256(_mm_loadu_pd(w));
    return _mm256_permute4x64_pd(v, 0x50);
}

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

const __m256d kConjMask = _mm256_setr_pd(0.0, -0.0, 0.0, -0.0);

}  // namespace

void horner_many(const cplx* coeff, std::size_t ncoeff, const cplx* pts, cplx* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d z = _mm256_loadu_pd(reinterpret_cast<const double*>(pts + i));
        __m256d v = _mm256_setzero_pd();
        for (std::size_t k = ncoeff; k-- > 0;) {
            v = cmul(v, z);
            v = _mm256_add_pd(v, broadcast_cplx(coeff[k]));
        }
        _mm256_storeu_pd(reinterpret_cast<double*>(out + i), v);
    }
    if (i < n) scalar::horner_many(coeff, ncoeff, pts + i, out + i, n - i);
}

double weighted_abs2(const cplx* v, const double* w, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d x = _mm256_loadu_pd(reinterpret_cast<const double*>(v + i));
        acc = _mm256_fmadd_pd(_mm256_mul_pd(x, x), widen_weights(w + i), acc);
    }
    double s = hsum(acc);
    if (i < n) s += scalar::weighted_abs2(v + i, w + i, n - i);
    return s;
}

cplx weighted_dot(const cplx* a, const cplx* b, const double* w, std::size_t n) {
    const __m256d sign = _mm256_setr_pd(1.0, -1.0, 1.0, -1.0);
    __m256d acc_re = _mm256_setzero_pd(), acc_im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d x = _mm256_loadu_pd(reinterpret_cast<const double*>(a + i));
        __m256d y = _mm256_loadu_pd(reinterpret_cast<const double*>(b + i));
        __m256d wd = widen_weights(w + i);
        acc_re = _mm256_fmadd_pd(_mm256_mul_pd(x, y), wd, acc_re);
        __m256d x_sw = _mm256_permute_pd(x, 0x5);
        acc_im = _mm256_fmadd_pd(_mm256_mul_pd(x_sw, y), _mm256_mul_pd(wd, sign), acc_im);
    }
    cplx s{hsum(acc_re), hsum(acc_im)};
    if (i < n) s += scalar::weighted_dot(a + i, b + i, w + i, n - i);
    return s;
}

void pair_form(const Mat2& C, const cplx* f1, const cplx* f2, const cplx* g1, const cplx* g2,
               cplx* out, std::size_t n) {
    __m256d c00 = broadcast_cplx(C(0, 0)), c01 = broadcast_cplx(C(0, 1));
    __m256d c10 = broadcast_cplx(C(1, 0)), c11 = broadcast_cplx(C(1, 1));
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d h1 = _mm256_xor_pd(_mm256_loadu_pd(reinterpret_cast<const double*>(g1 + i)), kConjMask);
        __m256d h2 = _mm256_xor_pd(_mm256_loadu_pd(reinterpret_cast<const double*>(g2 + i)), kConjMask);
        __m256d u1 = _mm256_loadu_pd(reinterpret_cast<const double*>(f1 + i));
        __m256d u2 = _mm256_loadu_pd(reinterpret_cast<const double*>(f2 + i));
        __m256d t1 = _mm256_add_pd(cmul(c00, h1), cmul(c01, h2));
        __m256d t2 = _mm256_add_pd(cmul(c10, h1), cmul(c11, h2));
        __m256d r = _mm256_add_pd(cmul(u1, t1), cmul(u2, t2));
        _mm256_storeu_pd(reinterpret_cast<double*>(out + i), r);
    }
    if (i < n) scalar::pair_form(C, f1 + i, f2 + i, g1 + i, g2 + i, out + i, n - i);
}

}  // namespace darboux::kernels::avx2

#endif

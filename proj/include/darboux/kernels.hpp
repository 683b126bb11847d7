#pragma once

#include <cstddef>

#include "darboux/types.hpp"

namespace darboux::kernels {

// Batch kernels for the arithmetic inner loops (series evaluation over quadrature
// and heatmap node sets, weighted reductions). Scalar reference implementations
// plus AVX2 variants selected once at runtime; both are exposed for equivalence
// tests.

// out[i] = sum_k coeff[k] * pts[i]^k  (Horner)
using HornerFn = void (*)(const cplx* coeff, std::size_t ncoeff, const cplx* pts,
                          cplx* out, std::size_t n);
// returns sum_i w[i] * |v[i]|^2
using WeightedAbs2Fn = double (*)(const cplx* v, const double* w, std::size_t n);
// returns sum_i w[i] * a[i] * conj(b[i])
using WeightedDotFn = cplx (*)(const cplx* a, const cplx* b, const double* w, std::size_t n);
// out[i] = sum_{j,k} C(j,k) * f_j[i] * conj(g_k[i])   (2x2 pairing contraction)
using PairFormFn = void (*)(const Mat2& C, const cplx* f1, const cplx* f2,
                            const cplx* g1, const cplx* g2, cplx* out, std::size_t n);

namespace scalar {
void horner_many(const cplx* coeff, std::size_t ncoeff, const cplx* pts, cplx* out, std::size_t n);
double weighted_abs2(const cplx* v, const double* w, std::size_t n);
cplx weighted_dot(const cplx* a, const cplx* b, const double* w, std::size_t n);
void pair_form(const Mat2& C, const cplx* f1, const cplx* f2, const cplx* g1, const cplx* g2,
               cplx* out, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void horner_many(const cplx* coeff, std::size_t ncoeff, const cplx* pts, cplx* out, std::size_t n);
double weighted_abs2(const cplx* v, const double* w, std::size_t n);
cplx weighted_dot(const cplx* a, const cplx* b, const double* w, std::size_t n);
void pair_form(const Mat2& C, const cplx* f1, const cplx* f2, const cplx* g1, const cplx* g2,
               cplx* out, std::size_t n);
}  // namespace avx2
#endif

struct Dispatch {
    HornerFn horner_many;
    WeightedAbs2Fn weighted_abs2;
    WeightedDotFn weighted_dot;
    PairFormFn pair_form;
    const char* backend;  // "scalar" or "avx2"
};

// Selected once per process; honors DARBOUX_NO_AVX2=1 for forcing the reference path.
const Dispatch& active();

}  // namespace darboux::kernels

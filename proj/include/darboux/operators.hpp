#pragma once

#include <array>
#include <optional>
#include <vector>

#include "darboux/odecore.hpp"

namespace darboux {

// Exponent-difference parameters attached to the singularities 0, x, 1, infinity.
// Fuchs relation: a0 + ax + a1 + ainf = 2(s+1).
struct DarbouxParams {
    cplx a0{}, ax{}, a1{}, ainf{};
    cplx s{};   // twist
    cplx x{};   // third finite singularity, x not in {0,1}

    std::array<cplx, 4> tuple() const { return {a0, ax, a1, ainf}; }
    cplx fuchs_residual() const { return a0 + ax + a1 + ainf - 2.0 * (s + 1.0); }
    bool main_regime(double tol = 1e-9) const {
        return std::abs(a0.real()) < tol && std::abs(ax.real()) < tol &&
               std::abs(a1.real()) < tol && std::abs(ainf.real()) < tol;
    }
};

// Gaudin data for four marked points (x, 1, 0, infinity) with weights
// lambda1..lambda3 at the finite points and lambda4 = lambda_inf at infinity.
// mu1 is the free eigenvalue; mu2, mu3 are recovered from
//   mu1 + mu2 + mu3 = 0,
//   x*mu1 + mu2 = lambda_inf(lambda_inf+2)/4 - sum_i lambda_i(lambda_i+2)/4,
// and mu4 = 0 by convention (simple-pole residues live at finite points only).
struct GaudinData {
    std::array<cplx, 4> lambda{};  // lambda[3] = lambda_inf
    cplx mu1{};
    cplx x{};  // the position the cross-ratio puts at "a"

    cplx beta() const { return (lambda[0] + lambda[1] + lambda[2] - lambda[3]) / 2.0; }
    std::array<cplx, 4> mus() const;
    // residual of the constraint linking lambda_inf to the mu's
    cplx constraint_residual() const;
};

enum class DarbouxClass { Reducible, Trigonometric, Elliptic, Confluent };

const char* to_string(DarbouxClass c);

// Classification by the multiset of singularity orders of the symbol on P^1
// (orders of finite zeros of P plus order 4-deg(P) at infinity).
DarbouxClass classify(const Poly& P, double tol = 1e-9);

// Elliptic operator with singularities {0, x, 1, inf}, exponents {0, a_p} at the
// finite points and {0, ainf} at infinity in the twisted chart. R is normalized to
// R(z) = r1*z (no constant term; constants live in the accessory parameter).
FuchsianOperator build_operator(const DarbouxParams& params, cplx lambda_unused = cplx(0));

// Read back exponent differences (0, x, 1, inf order).
std::array<cplx, 4> read_exponents(const FuchsianOperator& op, const DarbouxParams& params);

// a -> -a, s -> -2-s. build_operator of the result equals the formal adjoint of
// build_operator(params) up to an additive constant (see adjoint_constant).
DarbouxParams algebraic_adjoint(const DarbouxParams& params);

// Additive constant c with  formal_adjoint(L(params)) = L(algebraic_adjoint(params)) + c.
// The dual eigenvalue problem for L* at eigenvalue L is posed at lambda - c.
cplx adjoint_constant(const DarbouxParams& params);

// Formal adjoint of the polynomial triple: (P, 2P'-Q, P''-Q'+R).
FuchsianOperator formal_adjoint(const FuchsianOperator& op);

// The half-sum (F4) substitution of the Gaudin reduction, acting on the exponent
// tuple in the order (ax, a1, a0, ainf). Satisfies sigma^4 = id; sigma^2 is the
// signed permutation (ax,a1,a0,ainf) -> (a0, -ainf, ax, -a1).
DarbouxParams okamoto_dual(const DarbouxParams& params);

struct ReducibilityWitness {
    std::array<int, 4> signs;  // epsilon for (a0, ax, a1, ainf)
    int half_sum;              // the positive integer attained
};

// Scans the 16 sign vectors; empty when no half-sum is a positive integer.
std::vector<ReducibilityWitness> reducibility_locus(const DarbouxParams& params,
                                                    double tol = 1e-12);

// Gaudin N=4 reduction: exponent tuple via the half-sum formulas, accessory parameter
// Lambda = x(1-x) mu1 + (1/2) lambda1 (x(2 beta + lambda2) + (x-1) lambda3).
std::pair<DarbouxParams, cplx> gaudin_to_darboux(const GaudinData& g, double tol = 1e-10);

// The projective connection d^2/dt^2 - q(t) with q = sum_i [ li(li+2)/4 /(t-zi)^2 + mu_i/(t-zi) ],
// z = (x, 1, 0), cleared to polynomial form (P = prod (t-zi)^2, Q = 0, R = -q P, twist 0).
FuchsianOperator build_oper(const GaudinData& g);

// Degenerate/trigonometric model d (z^2-1) d with twist -1 (singularities -1, 1, inf).
FuchsianOperator build_trigonometric();

// Test model: d z d - alpha d = z d^2 + (1 - alpha) d, singular at 0 and inf.
FuchsianOperator build_model_operator(cplx alpha);

}  // namespace darboux

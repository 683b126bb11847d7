#pragma once

#include <array>
#include <optional>
#include <vector>

#include "darboux/operators.hpp"

namespace darboux {

struct MonodromyConfig {
    MonodromyConfig() {
        ode.rtol = 1e-11;
        ode.atol = 1e-13;
    }
    OdeTols ode{};
    int loop_vertices = 16;
    double loop_radius_factor = 0.5;   // times the minimal gap
    double relation_tol = 1e-6;
    std::optional<cplx> base_point{};  // default: centroid pushed off the singular axis
    bool check_relation = true;
    // true: continue the frame around counterclockwise polygon petals (the literal
    // loop realization); false: transport once to each matching point and apply the
    // exact local turn in the Frobenius frame (homotopic, numerically far better
    // conditioned at large |lambda|).
    bool use_path_loops = false;
};

// Monodromy of the frame (psi, psi') around counterclockwise loops based at `base`.
// Matrices act on frame vectors; traversing gamma_a then gamma_b composes as M_b*M_a.
// M_inf is computed independently from a clockwise circle enclosing all finite
// singularities, so M_inf*M1*Mx*M0 = I is a measured identity, not a definition.
// Raw local eigenvalues are {1, e^{2 pi i a_p}} at finite points and
// e^{-2 pi i s}*{1, e^{2 pi i a_inf}} at infinity (the O(s) section branch).
struct MonodromyRep {
    cplx base{};
    std::vector<cplx> loop_points;             // finite singularities, loop order
    std::vector<Mat2> M;                       // raw loop matrices, same order
    Mat2 Minf;                                 // raw, independent big-circle loop
    std::vector<Mat2> M_norm;                  // e^{-pi i a_p} M_p
    Mat2 Minf_norm;
    std::vector<cplx> exponent_diffs;          // a_p used for normalization
    cplx exponent_diff_inf{};
    cplx twist{};
    double relation_residual = 0;      // ||Minf*M1*Mx*M0 - I||_F
    double relation_residual_rel = 0;  // relative to the product's scale
    bool normalized = true;

    // indices of the loops around 0, x, 1 for the named accessors (elliptic case)
    int idx0 = -1, idxx = -1, idx1 = -1;
    const Mat2& M0() const { return M[idx0]; }
    const Mat2& Mx() const { return M[idxx]; }
    const Mat2& M1() const { return M[idx1]; }
};

// Computes loop matrices for op at accessory parameter lambda. For the elliptic
// Darboux family pass the params so loops are labeled 0, x, 1; other operators
// (trigonometric, opers) use the finite singularity list directly.
MonodromyRep compute_monodromy(const FuchsianOperator& op, cplx lambda,
                               const MonodromyConfig& cfg = MonodromyConfig{},
                               const DarbouxParams* params = nullptr);

// (tr M0, tr Mx, tr M1, tr Minf, tr M0Mx, tr MxM1, tr M0M1) of the normalized rep.
std::array<cplx, 7> trace_coordinates(const MonodromyRep& rep);

// Fricke relation residual for the seven coordinates under our ordering.
cplx cubic_surface_residual(const std::array<cplx, 7>& t);

// Unnormalized local eigenvalue targets {1, e^{2 pi i a}} matched against eig(M);
// returns the max deviation after optimal pairing.
double local_eigenvalue_mismatch(const Mat2& M, cplx a, cplx character = cplx(1));

}  // namespace darboux

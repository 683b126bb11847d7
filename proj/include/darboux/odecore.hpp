#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "darboux/poly.hpp"
#include "darboux/types.hpp"

namespace darboux {

// Polyline path in C. Loops are closed polylines.
struct PathSpec {
    std::vector<cplx> waypoints;
    double min_clearance = 1e-3;
};

PathSpec polygon_loop(cplx center, double radius, int nvertices, cplx start_dir = cplx(1, 0),
                      bool counterclockwise = true);

// One Frobenius solution at a singular point, in the local coordinate w
// (w = z - center for finite points, w = 1/z at infinity):
//   psi(w) = w^exponent * sum_k coeff[k] w^k
//          + log_factor * log(w) * w^log_exponent * sum_k log_coeff[k] w^k
struct SeriesSolution {
    cplx center{};
    bool at_infinity = false;
    cplx exponent{};
    std::vector<cplx> coeff;
    bool has_log = false;
    cplx log_factor{};
    cplx log_exponent{};
    std::vector<cplx> log_coeff;
    double radius = 0;

    cplx value(cplx w) const;
    // (psi, dpsi/dw) at w, principal branches of w^a and log w.
    std::array<cplx, 2> frame(cplx w) const;
};

struct TransferMatrix {
    Mat2 m = Mat2::identity();
    cplx from_pt{};
    cplx to_pt{};
};

// Normal form w^2 psi'' + w b(w) psi' + c(w) psi = 0 at a regular singular point.
struct LocalModel {
    std::vector<cplx> b, c;
    cplx rho1, rho2;  // indicial roots, Re(rho2) >= Re(rho1)
    double radius = 0;
};

struct SingularPoint {
    cplx z{};         // ignored when infinity
    bool infinity = false;
};

// Twisted second order operator P d^2 + Q d + R on P^1; the eigenvalue equation is
// (P d^2 + Q d + R) psi = lambda psi. At infinity the chart rule is
// d/dz -> -(w^2 d/dw - s w) acting on the w-chart representative psi_w = w^s psi_z.
struct FuchsianOperator {
    Poly P, Q, R;
    cplx twist{};  // s
    std::vector<cplx> finite_singularities;
    bool singular_at_infinity = true;

    // psi'' for the first order companion system.
    cplx rhs_second(cplx z, cplx lambda, cplx psi, cplx dpsi) const {
        return -(Q(z) * dpsi + (R(z) - lambda) * psi) / P(z);
    }

    double min_gap(cplx p) const;
    double series_radius(const SingularPoint& p) const;
    LocalModel local_model(const SingularPoint& p, cplx lambda, int order) const;

    // Exponent difference at a singular point (rho2 - rho1), by indicial readback.
    cplx exponent_difference(const SingularPoint& p, cplx lambda = cplx(0)) const;
};

struct OdeTols {
    double rtol = 1e-10;
    double atol = 1e-12;
    double series_tol = 1e-13;
    int max_series_terms = 200;
    double clearance_floor = 1e-4;
    // taylor: local Taylor recurrence stepping (near machine-epsilon per step, the
    // default); rk: Dormand-Prince 5(4) driven by rtol/atol.
    enum class Method { taylor, rk } method = Method::taylor;
    double taylor_step_factor = 0.35;  // step size relative to singularity distance
    int taylor_terms = 44;
};

// Frobenius pair at a regular singular point. First solution is the pure series
// (exponent 0 branch for Darboux-type points); second is the other exponent, or the
// log partner in the resonant case. allow_log=false raises ResonanceUnhandled when
// the exponent difference is an integer.
std::pair<SeriesSolution, SeriesSolution> frobenius_solutions(const FuchsianOperator& op,
                                                              const SingularPoint& p, cplx lambda,
                                                              int min_terms = 8,
                                                              bool allow_log = true,
                                                              const OdeTols& tols = OdeTols{});

// Residual of the truncated recurrence at |w| = r (used by tests and tail gating).
double series_recurrence_residual(const LocalModel& lm, const SeriesSolution& s, double r);

// Continue the frame (psi, psi') along a polyline; returns T with
// frame(end) = T * frame(start) for every solution.
TransferMatrix transfer_along(const FuchsianOperator& op, cplx lambda, const PathSpec& path,
                              const OdeTols& tols = OdeTols{});

// Frame matrix of the Frobenius pair at the real offset r from the singular point:
// columns are (psi_i, dpsi_i/dz) at z = p + r (finite) or z = 1/r (infinity),
// in the z-chart.
TransferMatrix match_at_singularity(const FuchsianOperator& op, const SingularPoint& p,
                                    cplx lambda, int min_terms, double r,
                                    const OdeTols& tols = OdeTols{});

// Same but returning the local frame in the local coordinate (w-chart at infinity).
Mat2 local_frame_matrix(const std::pair<SeriesSolution, SeriesSolution>& pair, cplx w);

// Chart conversion at z = 1/w: frame (psi_w, dpsi_w/dw) -> (psi_z, dpsi_z/dz).
Mat2 infinity_chart_to_z(cplx w, cplx twist);

double segment_clearance(cplx a, cplx b, cplx p);
void check_path(const PathSpec& path, const std::vector<cplx>& singularities, double floor);

// Extended-precision kernel used by the monodromy assembly: the frame transport and
// the local-frame conjugations run in long double so the subdominant solution
// component survives the connection-problem conditioning.
namespace xp {

using real = long double;
using cx = std::complex<long double>;

inline cx lift_scalar(const cplx& z) { return cx(z.real(), z.imag()); }

struct XMat2 {
    std::array<cx, 4> a{};
    static XMat2 identity() { return {{cx(1), cx(0), cx(0), cx(1)}}; }
    static XMat2 from(const Mat2& m);
    Mat2 to_double() const;
    cx det() const { return a[0] * a[3] - a[1] * a[2]; }
    XMat2 inverse() const;
    friend XMat2 operator*(const XMat2& x, const XMat2& y);
    friend XMat2 operator*(const cx& s, const XMat2& m);
};

// Taylor-stepped frame transport along a straight segment, entirely in long double.
XMat2 taylor_transfer(const FuchsianOperator& op, cplx lambda, cplx za, cplx zb,
                      const XMat2& y0, const OdeTols& tols);

// Local Frobenius frame matrix evaluated in long double.
XMat2 local_frame_matrix_xp(const std::pair<SeriesSolution, SeriesSolution>& pair, cplx w);

XMat2 infinity_chart_to_z_xp(cplx w, cplx twist);

}  // namespace xp

// integral of Q/P along the path (Gauss-Legendre), for Wronskian checks.
cplx integrate_q_over_p(const FuchsianOperator& op, const PathSpec& path);

}  // namespace darboux

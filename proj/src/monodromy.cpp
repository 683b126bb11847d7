#include "darboux/monodromy.hpp"

#include <algorithm>
#include <cmath>

namespace darboux {

namespace {

cplx default_base_point(const std::vector<cplx>& sing) {
    cplx c(0);
    for (const cplx& p : sing) c += p;
    c /= double(sing.size());
    double spread = 0;
    for (const cplx& p : sing)
        for (const cplx& q : sing) spread = std::max(spread, std::abs(p - q));
    if (spread == 0) spread = 1.0;
    // push off the axis through the two farthest points, into the upper half plane,
    // so the petals see the points in a fixed angular order
    cplx axis(1, 0);
    if (sing.size() >= 2) {
        double best = 0;
        for (const cplx& p : sing)
            for (const cplx& q : sing)
                if (std::abs(p - q) > best) {
                    best = std::abs(p - q);
                    axis = (q - p) / std::abs(q - p);
                }
    }
    cplx normal = axis * cplx(0, 1);
    if (normal.imag() < 0) normal = -normal;  // prefer the upper half plane
    return c + 0.45 * spread * normal;
}

PathSpec petal(cplx base, cplx center, double radius, int nverts, double clearance) {
    // base -> circle entry (radially), CCW polygon, back
    cplx dir = (base - center) / std::abs(base - center);
    PathSpec loop = polygon_loop(center, radius, nverts, dir, true);
    PathSpec p;
    p.min_clearance = clearance;
    p.waypoints.push_back(base);
    for (const cplx& w : loop.waypoints) p.waypoints.push_back(w);
    p.waypoints.push_back(base);
    return p;
}

// Conjugate the whole representation into the frame that triangularizes Minf
// (unitary, free of conditioning cost) and balances the off-diagonal scales
// (diagonal). Keeps matrix entries at the intrinsic trace scale, which sets the
// noise floor of everything downstream.
void balance_frame(std::vector<Mat2>& ms, Mat2& minf) {
    auto ev = minf.eigenvalues();
    cplx lam = std::abs(ev[0]) >= std::abs(ev[1]) ? ev[0] : ev[1];
    // kernel direction of (minf - lam I): pick the larger row cross products
    Mat2 A = minf - lam * Mat2::identity();
    // v orthogonal to the larger row of A
    std::array<cplx, 2> r0{A(0, 0), A(0, 1)}, r1{A(1, 0), A(1, 1)};
    double n0 = std::norm(r0[0]) + std::norm(r0[1]);
    double n1 = std::norm(r1[0]) + std::norm(r1[1]);
    std::array<cplx, 2> row = n0 >= n1 ? r0 : r1;
    std::array<cplx, 2> v1;
    if (n0 + n1 < 1e-28) {
        v1 = {cplx(1), cplx(0)};
    } else {
        v1 = {-row[1], row[0]};  // A v1 = 0 (bilinear, not Hermitian, orthogonality)
        double nv = std::sqrt(std::norm(v1[0]) + std::norm(v1[1]));
        v1 = {v1[0] / nv, v1[1] / nv};
    }
    std::array<cplx, 2> v2{-std::conj(v1[1]), std::conj(v1[0])};
    Mat2 U{{v1[0], v2[0], v1[1], v2[1]}};  // columns v1, v2 (unitary)
    Mat2 Ui = U.adjointH();
    for (Mat2& m : ms) m = Ui * m * U;
    minf = Ui * minf * U;
    // diagonal balance: conjugation by diag(t, 1/t) scales m01 by t^2, m10 by 1/t^2
    double up = 0, dn = 0;
    std::vector<const Mat2*> all;
    for (const Mat2& m : ms) all.push_back(&m);
    all.push_back(&minf);
    for (const Mat2* m : all) {
        up = std::max(up, std::abs((*m)(0, 1)));
        dn = std::max(dn, std::abs((*m)(1, 0)));
    }
    if (up > 0 && dn > 0) {
        // conjugation by diag(d, 1/d) maps m01 -> m01/d^2, m10 -> m10 d^2;
        // d^2 = sqrt(up/dn) equalizes the two maxima at sqrt(up*dn)
        double d2 = std::sqrt(up / dn);
        double d = std::sqrt(d2);
        Mat2 D{{cplx(d), cplx(0), cplx(0), cplx(1.0 / d)}};
        Mat2 Di{{cplx(1.0 / d), cplx(0), cplx(0), cplx(d)}};
        for (Mat2& m : ms) m = Di * m * D;
        minf = Di * minf * D;
    }
}

// Exact local monodromy of the Frobenius pair (in the basis psi_1, psi_2) for one
// counterclockwise turn of the local coordinate.
Mat2 local_loop_matrix(const std::pair<SeriesSolution, SeriesSolution>& pr) {
    const SeriesSolution& s1 = pr.first;
    const SeriesSolution& s2 = pr.second;
    Mat2 m = Mat2::zero();
    if (!s2.has_log) {
        m(0, 0) = std::exp(2.0 * kPi * kI * s1.exponent);
        m(1, 1) = std::exp(2.0 * kPi * kI * s2.exponent);
        return m;
    }
    // psi1 pure series at exponent rho, psi2 = C psi1 log w + w^{rho - N} g:
    // psi1 -> mu psi1, psi2 -> mu psi2 + 2 pi i C mu psi1, mu = e^{2 pi i rho}
    cplx mu = std::exp(2.0 * kPi * kI * s1.exponent);
    m(0, 0) = mu;
    m(1, 1) = mu;
    m(0, 1) = 2.0 * kPi * kI * s2.log_factor * mu;
    return m;
}

}  // namespace

MonodromyRep compute_monodromy(const FuchsianOperator& op, cplx lambda,
                               const MonodromyConfig& cfg, const DarbouxParams* params) {
    const std::vector<cplx>& sing = op.finite_singularities;
    MonodromyRep rep;
    rep.twist = op.twist;
    rep.base = cfg.base_point.value_or(default_base_point(sing));

    // loop order: by angle as seen from the base point (counterclockwise product order)
    std::vector<int> order(sing.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = (int)i;
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        return std::arg(sing[i] - rep.base) > std::arg(sing[j] - rep.base);
    });
    // base below the axis: descending angle == left-to-right along the axis

    double spread = 0;
    for (const cplx& p : sing)
        for (const cplx& q : sing) spread = std::max(spread, std::abs(p - q));
    if (spread == 0) spread = 1.0;

    const cplx chi_inf = std::exp(-2.0 * kPi * kI * op.twist);

    if (cfg.use_path_loops) {
        // literal realization: counterclockwise polygon petals from the base point,
        // frame = unit initial values at the base
        for (int idx : order) {
            cplx p = sing[idx];
            double gap = op.min_gap(p);
            if (!std::isfinite(gap)) gap = spread;
            std::vector<cplx> others;
            for (const cplx& q : sing)
                if (std::abs(q - p) > 1e-14) others.push_back(q);
            double radius = cfg.loop_radius_factor * std::min(gap, std::abs(rep.base - p));
            PathSpec loop = petal(rep.base, p, radius, cfg.loop_vertices, cfg.ode.clearance_floor);
            check_path(loop, others, cfg.ode.clearance_floor);
            Mat2 m = Mat2::identity();
            for (size_t i = 0; i + 1 < loop.waypoints.size(); ++i) {
                PathSpec seg{{loop.waypoints[i], loop.waypoints[i + 1]}, 0.0};
                m = transfer_along(op, lambda, seg, cfg.ode).m * m;
            }
            rep.loop_points.push_back(p);
            rep.M.push_back(m);
        }
        double rbig = 0;
        for (const cplx& p : sing) rbig = std::max(rbig, std::abs(p) + op.min_gap(p));
        rbig = std::max(rbig, 1.5 * spread + std::abs(rep.base)) * 1.5;
        cplx out_dir = std::abs(rep.base) > 1e-12 ? rep.base / std::abs(rep.base) : cplx(1, 0);
        cplx entry = out_dir * rbig;
        PathSpec route{{rep.base, entry}, cfg.ode.clearance_floor};
        check_path(route, sing, cfg.ode.clearance_floor);
        PathSpec circle =
            polygon_loop(cplx(0), rbig, std::max(24, cfg.loop_vertices), out_dir, /*ccw=*/false);
        Mat2 m = transfer_along(op, lambda, route, cfg.ode).m;
        for (size_t i = 0; i + 1 < circle.waypoints.size(); ++i) {
            PathSpec seg{{circle.waypoints[i], circle.waypoints[i + 1]}, 0.0};
            m = transfer_along(op, lambda, seg, cfg.ode).m * m;
        }
        PathSpec segb{{entry, rep.base}, 0.0};
        rep.Minf = transfer_along(op, lambda, segb, cfg.ode).m * m;
    } else {
        // Matched realization: each loop is homotopic to stem^-1 * (one local turn) *
        // stem in the unit frame at the base point; the turn is the exact local
        // monodromy in the Frobenius basis. Afterwards the whole representation is
        // conjugated into the balanced Minf-triangular frame.
        for (int idx : order) {
            cplx p = sing[idx];
            double gap = op.min_gap(p);
            if (!std::isfinite(gap)) gap = spread;
            std::vector<cplx> others;
            for (const cplx& q : sing)
                if (std::abs(q - p) > 1e-14) others.push_back(q);
            double rmatch = std::min(0.35 * gap, 0.45 * std::abs(rep.base - p));
            cplx dir = (rep.base - p) / std::abs(rep.base - p);
            cplx anchor = p + rmatch * dir;
            PathSpec stem{{rep.base, anchor}, cfg.ode.clearance_floor};
            check_path(stem, others, cfg.ode.clearance_floor);
            xp::XMat2 T =
                xp::taylor_transfer(op, lambda, rep.base, anchor, xp::XMat2::identity(), cfg.ode);
            auto pr = frobenius_solutions(op, {p, false}, lambda, 8, true, cfg.ode);
            xp::XMat2 G = xp::local_frame_matrix_xp(pr, anchor - p).inverse() * T;
            xp::XMat2 loc = xp::XMat2::from(local_loop_matrix(pr));
            rep.loop_points.push_back(p);
            rep.M.push_back((G.inverse() * loc * G).to_double());
        }
        // infinity: matched in the twisted w-chart along the outward ray through the
        // base point; the section branch contributes the character e^{-2 pi i s}
        auto prinf = frobenius_solutions(op, {cplx(0), true}, lambda, 8, true, cfg.ode);
        double rw = 0.35 * op.series_radius({cplx(0), true});
        if (!std::isfinite(rw) || rw <= 0) rw = 0.35;
        cplx c(0);
        for (const cplx& q : sing) c += q;
        c /= double(sing.size());
        cplx out_dir = std::abs(rep.base - c) > 1e-12 ? (rep.base - c) / std::abs(rep.base - c)
                                                      : cplx(0, 1);
        cplx hub = out_dir / rw;
        PathSpec stem{{rep.base, hub}, cfg.ode.clearance_floor};
        check_path(stem, sing, cfg.ode.clearance_floor);
        xp::XMat2 T = xp::taylor_transfer(op, lambda, rep.base, hub, xp::XMat2::identity(), cfg.ode);
        cplx whub = 1.0 / hub;
        xp::XMat2 y0 =
            xp::infinity_chart_to_z_xp(whub, op.twist) * xp::local_frame_matrix_xp(prinf, whub);
        xp::XMat2 G = y0.inverse() * T;
        xp::XMat2 loc = xp::XMat2::from(local_loop_matrix(prinf));
        rep.Minf = (xp::lift_scalar(chi_inf) * (G.inverse() * loc * G)).to_double();
        balance_frame(rep.M, rep.Minf);
    }

    // measured group relation Minf * M(1st) * M(2nd) * ... = I; with the base point in
    // the upper half plane the traversal order is 1, x, 0, giving Minf*M1*Mx*M0 = I.
    Mat2 prod = Mat2::identity();
    for (size_t k = 0; k < rep.M.size(); ++k) prod = prod * rep.M[k];
    rep.relation_residual = frob_dist(rep.Minf * prod, Mat2::identity());
    double scale = 1.0;
    for (const Mat2& m : rep.M) scale = std::max(scale, m.frobenius());
    scale = std::max(scale, rep.Minf.frobenius());
    rep.relation_residual_rel = rep.relation_residual / (scale * scale);
    if (cfg.check_relation && rep.relation_residual_rel > cfg.relation_tol)
        throw NumericalError(ErrorCode::ResidualTooLarge,
                             "monodromy relation residual " +
                                 std::to_string(rep.relation_residual));

    // exponent differences and normalization
    for (const cplx& p : rep.loop_points) {
        cplx a = op.exponent_difference({p, false}, lambda);
        rep.exponent_diffs.push_back(a);
    }
    rep.exponent_diff_inf = op.exponent_difference({cplx(0), true}, lambda);
    for (size_t k = 0; k < rep.M.size(); ++k) {
        // pick the sign of a_p for which eig(M) best matches {1, e^{2 pi i a}}
        cplx a = rep.exponent_diffs[k];
        if (local_eigenvalue_mismatch(rep.M[k], -a) < local_eigenvalue_mismatch(rep.M[k], a)) {
            a = -a;
            rep.exponent_diffs[k] = a;
        }
        rep.M_norm.push_back(std::exp(-kI * kPi * a) * rep.M[k]);
    }
    {
        cplx a = rep.exponent_diff_inf;
        cplx chi = std::exp(-2.0 * kPi * kI * op.twist);  // raw branch character at infinity
        if (local_eigenvalue_mismatch(rep.Minf, -a, chi) <
            local_eigenvalue_mismatch(rep.Minf, a, chi))
            rep.exponent_diff_inf = a = -a;
        rep.Minf_norm = (std::exp(-kI * kPi * a) / chi) * rep.Minf;
    }

    if (params) {
        for (size_t k = 0; k < rep.loop_points.size(); ++k) {
            if (std::abs(rep.loop_points[k]) < 1e-12) rep.idx0 = (int)k;
            else if (std::abs(rep.loop_points[k] - 1.0) < 1e-12) rep.idx1 = (int)k;
            else if (std::abs(rep.loop_points[k] - params->x) < 1e-12) rep.idxx = (int)k;
        }
    } else if (rep.loop_points.size() == 3) {
        for (size_t k = 0; k < 3; ++k) {
            if (std::abs(rep.loop_points[k]) < 1e-12) rep.idx0 = (int)k;
            else if (std::abs(rep.loop_points[k] - 1.0) < 1e-12) rep.idx1 = (int)k;
            else rep.idxx = (int)k;
        }
    }
    return rep;
}

std::array<cplx, 7> trace_coordinates(const MonodromyRep& rep) {
    if (rep.idx0 < 0 || rep.idxx < 0 || rep.idx1 < 0)
        throw NumericalError(ErrorCode::BadConfig, "trace coordinates need loops at 0, x, 1");
    const Mat2 &m0 = rep.M_norm[rep.idx0], &mx = rep.M_norm[rep.idxx], &m1 = rep.M_norm[rep.idx1];
    return {m0.trace(),           mx.trace(),           m1.trace(), rep.Minf_norm.trace(),
            (m0 * mx).trace(),    (mx * m1).trace(),    (m0 * m1).trace()};
}

cplx cubic_surface_residual(const std::array<cplx, 7>& t) {
    const cplx a = t[0], b = t[1], c = t[2], d = t[3], x = t[4], y = t[5], z = t[6];
    return x * y * z + x * x + y * y + z * z - (a * b + c * d) * x - (b * c + a * d) * y -
           (a * c + b * d) * z + a * a + b * b + c * c + d * d + a * b * c * d - 4.0;
}

double local_eigenvalue_mismatch(const Mat2& M, cplx a, cplx character) {
    auto ev = M.eigenvalues();
    cplx t1 = character, t2 = character * std::exp(2.0 * kPi * kI * a);
    double d1 = std::max(std::abs(ev[0] - t1), std::abs(ev[1] - t2));
    double d2 = std::max(std::abs(ev[0] - t2), std::abs(ev[1] - t1));
    return std::min(d1, d2);
}

}  // namespace darboux

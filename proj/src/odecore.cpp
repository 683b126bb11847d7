#include "darboux/odecore.hpp"

#include <algorithm>
#include <cmath>

namespace darboux {

namespace {

// Laurent polynomial with explicit lowest exponent.
struct Laurent {
    std::vector<cplx> c;  // c[k] multiplies w^(low + k)
    int low = 0;
};

Laurent laurent_from_poly_inv(const Poly& p, int shift) {
    // p(1/w) * w^shift
    std::vector<cplx> c;
    int d = std::max(p.degree(), 0);
    c.resize(d + 1);
    for (int k = 0; k <= d; ++k) c[d - k] = p.coeff(k);  // exponent shift-k ordered ascending
    return Laurent{std::move(c), shift - d};
}

void laurent_add(Laurent& a, const Laurent& b) {
    if (b.c.empty()) return;
    if (a.c.empty()) {
        a = b;
        return;
    }
    int low = std::min(a.low, b.low);
    int high = std::max(a.low + (int)a.c.size(), b.low + (int)b.c.size());
    std::vector<cplx> c(high - low, cplx(0));
    for (size_t k = 0; k < a.c.size(); ++k) c[a.low - low + k] += a.c[k];
    for (size_t k = 0; k < b.c.size(); ++k) c[b.low - low + k] += b.c[k];
    a = Laurent{std::move(c), low};
}

void laurent_scale(Laurent& a, cplx s) {
    for (auto& v : a.c) v *= s;
}

int effective_low(const Laurent& a, double tol) {
    double scale = 0;
    for (const auto& v : a.c) scale = std::max(scale, std::abs(v));
    if (scale == 0) return a.low + (int)a.c.size();
    size_t k = 0;
    while (k < a.c.size() && std::abs(a.c[k]) <= tol * scale) ++k;
    return a.low + (int)k;
}

std::vector<cplx> laurent_slice_from(const Laurent& a, int from, int len) {
    std::vector<cplx> out(len, cplx(0));
    for (int k = 0; k < len; ++k) {
        int e = from + k;
        int idx = e - a.low;
        if (idx >= 0 && idx < (int)a.c.size()) out[k] = a.c[idx];
    }
    return out;
}

// Indicial polynomial I(rho) = rho(rho-1) + b0 rho + c0.
cplx indicial(cplx rho, cplx b0, cplx c0) { return rho * (rho - 1.0) + b0 * rho + c0; }

// Frobenius coefficients for exponent rho: I(rho+k) c_k = -sum_{j=1..k} [b_j (rho+k-j) + c_j] c_{k-j}.
std::vector<cplx> plain_series(const LocalModel& lm, cplx rho, int K) {
    std::vector<cplx> f(K + 1, cplx(0));
    f[0] = cplx(1);
    const cplx b0 = lm.b[0], c0 = lm.c[0];
    for (int k = 1; k <= K; ++k) {
        cplx s(0);
        for (int j = 1; j <= k; ++j) {
            cplx bj = j < (int)lm.b.size() ? lm.b[j] : cplx(0);
            cplx cj = j < (int)lm.c.size() ? lm.c[j] : cplx(0);
            s += (bj * (rho + cplx(k - j)) + cj) * f[k - j];
        }
        f[k] = -s / indicial(rho + cplx(k), b0, c0);
    }
    return f;
}

}  // namespace

PathSpec polygon_loop(cplx center, double radius, int nverts, cplx start_dir, bool ccw) {
    PathSpec p;
    start_dir /= std::abs(start_dir);
    double sgn = ccw ? 1.0 : -1.0;
    for (int k = 0; k <= nverts; ++k) {
        double th = sgn * 2.0 * kPi * k / nverts;
        p.waypoints.push_back(center + radius * start_dir * std::exp(cplx(0, th)));
    }
    return p;
}

cplx SeriesSolution::value(cplx w) const {
    cplx f(0);
    for (size_t k = coeff.size(); k-- > 0;) f = f * w + coeff[k];
    cplx v = std::exp(exponent * std::log(w)) * f;
    if (has_log) {
        cplx g(0);
        for (size_t k = log_coeff.size(); k-- > 0;) g = g * w + log_coeff[k];
        v += log_factor * std::log(w) * std::exp(log_exponent * std::log(w)) * g;
    }
    return v;
}

std::array<cplx, 2> SeriesSolution::frame(cplx w) const {
    cplx f(0), fp(0);
    for (size_t k = coeff.size(); k-- > 0;) f = f * w + coeff[k];
    for (size_t k = coeff.size(); k-- > 1;) fp = fp * w + double(k) * coeff[k];
    cplx lw = std::log(w);
    cplx wr = std::exp(exponent * lw);
    cplx val = wr * f;
    cplx der = wr / w * (exponent * f + w * fp);
    if (has_log) {
        cplx g(0), gp(0);
        for (size_t k = log_coeff.size(); k-- > 0;) g = g * w + log_coeff[k];
        for (size_t k = log_coeff.size(); k-- > 1;) gp = gp * w + double(k) * log_coeff[k];
        cplx wr2 = std::exp(log_exponent * lw);
        val += log_factor * lw * wr2 * g;
        der += log_factor * (wr2 / w * g + lw * wr2 / w * (log_exponent * g + w * gp));
    }
    return {val, der};
}

double FuchsianOperator::min_gap(cplx p) const {
    double g = std::numeric_limits<double>::infinity();
    for (const cplx& q : finite_singularities)
        if (std::abs(q - p) > 1e-14) g = std::min(g, std::abs(q - p));
    return g;
}

double FuchsianOperator::series_radius(const SingularPoint& p) const {
    if (p.infinity) {
        double r = std::numeric_limits<double>::infinity();
        for (const cplx& q : finite_singularities)
            if (std::abs(q) > 1e-14) r = std::min(r, 1.0 / std::abs(q));
        return r;
    }
    return min_gap(p.z);
}

LocalModel FuchsianOperator::local_model(const SingularPoint& p, cplx lambda, int order) const {
    const int n = order + 4;
    Laurent A, B, C;
    if (p.infinity) {
        A = laurent_from_poly_inv(P, 4);
        B = laurent_from_poly_inv(P, 3);
        laurent_scale(B, 2.0 * (1.0 - twist));
        Laurent Bq = laurent_from_poly_inv(Q, 2);
        laurent_scale(Bq, cplx(-1));
        laurent_add(B, Bq);
        C = laurent_from_poly_inv(P, 2);
        laurent_scale(C, twist * (twist - 1.0));
        Laurent Cq = laurent_from_poly_inv(Q, 1);
        laurent_scale(Cq, twist);
        laurent_add(C, Cq);
        Laurent Cr = laurent_from_poly_inv(R - Poly::constant(lambda), 0);
        laurent_add(C, Cr);
    } else {
        A = Laurent{P.shifted(p.z).coeffs(), 0};
        B = Laurent{Q.shifted(p.z).coeffs(), 0};
        C = Laurent{(R - Poly::constant(lambda)).shifted(p.z).coeffs(), 0};
        if (B.c.empty()) B = Laurent{{cplx(0)}, 0};
        if (C.c.empty()) C = Laurent{{cplx(0)}, 0};
    }
    // Scaling the equation by powers of w leaves the normal form invariant, so slice
    // b and c relative to the effective vanishing order of the symbol.
    const double drop_tol = 1e-11;
    const int la = effective_low(A, drop_tol);
    if (!p.infinity && la - A.low == 0)
        throw NumericalError(ErrorCode::NotSingular, "ordinary point");
    if (p.infinity && !singular_at_infinity)
        throw NumericalError(ErrorCode::NotSingular, "infinity is an ordinary point");
    if (!p.infinity && la - A.low > 2)
        throw NumericalError(ErrorCode::NotSingular, "irregular singular point");
    if (effective_low(B, drop_tol) < la - 1 || effective_low(C, drop_tol) < la - 2)
        throw NumericalError(ErrorCode::NotSingular, "not a regular singular point");

    std::vector<cplx> u = laurent_slice_from(A, la, n);
    std::vector<cplx> bnum = laurent_slice_from(B, la - 1, n);
    std::vector<cplx> cnum = laurent_slice_from(C, la - 2, n);
    LocalModel lm;
    lm.b = series_divide(bnum, u, n);
    lm.c = series_divide(cnum, u, n);
    // indicial roots
    cplx b0 = lm.b[0], c0 = lm.c[0];
    cplx disc = std::sqrt((b0 - 1.0) * (b0 - 1.0) - 4.0 * c0);
    cplx r1 = (1.0 - b0 - disc) / 2.0, r2 = (1.0 - b0 + disc) / 2.0;
    const double re_tie = 1e-13 * (1.0 + std::abs(r1) + std::abs(r2));
    if (r1.real() > r2.real() + re_tie ||
        (std::abs(r1.real() - r2.real()) <= re_tie && r1.imag() > r2.imag()))
        std::swap(r1, r2);
    lm.rho1 = r1;
    lm.rho2 = r2;
    lm.radius = series_radius(p);
    return lm;
}

cplx FuchsianOperator::exponent_difference(const SingularPoint& p, cplx lambda) const {
    LocalModel lm = local_model(p, lambda, 4);
    return lm.rho2 - lm.rho1;
}

std::pair<SeriesSolution, SeriesSolution> frobenius_solutions(const FuchsianOperator& op,
                                                              const SingularPoint& p, cplx lambda,
                                                              int min_terms, bool allow_log,
                                                              const OdeTols& tols) {
    LocalModel lm = op.local_model(p, lambda, tols.max_series_terms + 4);
    const cplx alpha = lm.rho2 - lm.rho1;
    const double alpha_int_dist = std::abs(alpha - std::round(alpha.real()));
    const bool resonant = std::abs(alpha.imag()) < 1e-12 && alpha_int_dist < 1e-12;

    // adaptive truncation: grow K until tail at radius/2 is below series_tol
    auto tail_ok = [&](const std::vector<cplx>& f, int K, double r) {
        double t = 0;
        for (int k = std::max(1, K - 2); k <= K; ++k) t = std::max(t, std::abs(f[k]) * std::pow(r, k));
        return t < tols.series_tol;
    };

    const double rhalf = lm.radius / 2.0;
    int K = std::max(min_terms, 24);

    SeriesSolution s1, s2;
    s1.center = s2.center = p.infinity ? cplx(0) : p.z;
    s1.at_infinity = s2.at_infinity = p.infinity;
    s1.radius = s2.radius = lm.radius;

    if (!resonant) {
        for (;; K = std::min(2 * K, tols.max_series_terms)) {
            auto f2 = plain_series(lm, lm.rho2, K);
            auto f1 = plain_series(lm, lm.rho1, K);
            if ((tail_ok(f1, K, rhalf) && tail_ok(f2, K, rhalf)) || K >= tols.max_series_terms) {
                // order: exponent closest to zero first (the "exponent 0" branch)
                bool first_is_r1 = std::abs(lm.rho1) <= std::abs(lm.rho2);
                s1.exponent = first_is_r1 ? lm.rho1 : lm.rho2;
                s1.coeff = first_is_r1 ? std::move(f1) : std::move(f2);
                s2.exponent = first_is_r1 ? lm.rho2 : lm.rho1;
                s2.coeff = first_is_r1 ? std::move(f2) : std::move(f1);
                break;
            }
        }
        return {s1, s2};
    }

    if (!allow_log)
        throw NumericalError(ErrorCode::ResonanceUnhandled,
                             "integer exponent difference; log branch required");

    const int N = (int)std::llround(alpha.real());
    const cplx rho = lm.rho1;  // smaller root; rho2 = rho + N
    for (;; K = std::min(2 * K, tols.max_series_terms)) {
        std::vector<cplx> f1 = plain_series(lm, lm.rho2, K);  // pure series at larger exponent
        // h(w): coefficients of w^{rho1+N+k} in (2 w psi1' - psi1 + b psi1), psi1 = w^{rho2} f1:
        // h_k = (2(rho2+k) - 1) f1_k + sum_{j=0..k} b_j f1_{k-j}
        std::vector<cplx> h(K + 1, cplx(0));
        for (int k = 0; k <= K; ++k) {
            cplx s = (2.0 * (lm.rho2 + cplx(k)) - 1.0) * f1[k];
            for (int j = 0; j <= k && j < (int)lm.b.size(); ++j) s += lm.b[j] * f1[k - j];
            h[k] = s;
        }

        std::vector<cplx> g(K + 1, cplx(0));
        cplx Cfac;
        const cplx b0 = lm.b[0], c0 = lm.c[0];
        if (N == 0) {
            Cfac = cplx(1);
            g[0] = cplx(0);
            for (int k = 1; k <= K; ++k) {
                cplx s(0);
                for (int j = 1; j <= k; ++j) {
                    cplx bj = j < (int)lm.b.size() ? lm.b[j] : cplx(0);
                    cplx cj = j < (int)lm.c.size() ? lm.c[j] : cplx(0);
                    s += (bj * (rho + cplx(k - j)) + cj) * g[k - j];
                }
                s += Cfac * h[k];  // log-coupling (h shifted by N=0)
                g[k] = -s / indicial(rho + cplx(k), b0, c0);
            }
        } else {
            g[0] = cplx(1);
            // below resonance: plain recurrence
            for (int k = 1; k < N; ++k) {
                cplx s(0);
                for (int j = 1; j <= k; ++j) {
                    cplx bj = j < (int)lm.b.size() ? lm.b[j] : cplx(0);
                    cplx cj = j < (int)lm.c.size() ? lm.c[j] : cplx(0);
                    s += (bj * (rho + cplx(k - j)) + cj) * g[k - j];
                }
                g[k] = -s / indicial(rho + cplx(k), b0, c0);
            }
            // at k = N the indicial factor vanishes: solve for the log strength
            cplx obstruction(0);
            for (int j = 1; j <= N; ++j) {
                cplx bj = j < (int)lm.b.size() ? lm.b[j] : cplx(0);
                cplx cj = j < (int)lm.c.size() ? lm.c[j] : cplx(0);
                obstruction += (bj * (rho + cplx(N - j)) + cj) * g[N - j];
            }
            Cfac = -obstruction / h[0];
            g[N] = cplx(0);  // fix the free coefficient
            for (int k = N + 1; k <= K; ++k) {
                cplx s(0);
                for (int j = 1; j <= k; ++j) {
                    cplx bj = j < (int)lm.b.size() ? lm.b[j] : cplx(0);
                    cplx cj = j < (int)lm.c.size() ? lm.c[j] : cplx(0);
                    s += (bj * (rho + cplx(k - j)) + cj) * g[k - j];
                }
                s += Cfac * h[k - N];
                g[k] = -s / indicial(rho + cplx(k), b0, c0);
            }
        }

        if ((tail_ok(f1, K, rhalf) && tail_ok(g, K, rhalf)) || K >= tols.max_series_terms) {
            s1.exponent = lm.rho2;
            s1.coeff = std::move(f1);
            s2.exponent = rho;
            s2.coeff = std::move(g);
            s2.has_log = true;
            s2.log_factor = Cfac;
            s2.log_exponent = lm.rho2;
            s2.log_coeff = s1.coeff;
            return {s1, s2};
        }
    }
}

double series_recurrence_residual(const LocalModel& lm, const SeriesSolution& s, double r) {
    // residual of w^2 psi'' + w b psi' + c psi applied to the truncated series, at |w| = r,
    // relative to the series scale; log solutions checked through their pure partner only.
    const std::vector<cplx>& f = s.coeff;
    const cplx rho = s.exponent;
    const int K = (int)f.size() - 1;
    double res = 0;
    for (int k = K + 1; k <= K + 3; ++k) {
        cplx acc(0);
        for (int j = k - K; j <= k && j < (int)lm.b.size(); ++j)
            acc += (lm.b[j] * (rho + cplx(k - j))) * f[k - j];
        for (int j = k - K; j <= k && j < (int)lm.c.size(); ++j) acc += lm.c[j] * f[k - j];
        res += std::abs(acc) * std::pow(r, k);
    }
    return res;
}

double segment_clearance(cplx a, cplx b, cplx p) {
    cplx d = b - a;
    double L2 = std::norm(d);
    if (L2 == 0) return std::abs(p - a);
    double t = std::clamp(((p - a) * std::conj(d)).real() / L2, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

void check_path(const PathSpec& path, const std::vector<cplx>& sing, double floor) {
    const double clr = std::max(path.min_clearance, floor);
    for (size_t i = 0; i + 1 < path.waypoints.size(); ++i) {
        if (std::abs(path.waypoints[i + 1] - path.waypoints[i]) == 0.0) continue;
        for (const cplx& p : sing) {
            double d = segment_clearance(path.waypoints[i], path.waypoints[i + 1], p);
            if (d < clr)
                throw NumericalError(ErrorCode::SingularityTooClose,
                                     "path clearance " + std::to_string(d));
        }
    }
}

namespace {

struct Frame {
    // columns: two solutions, rows: (psi, psi')
    Mat2 y = Mat2::identity();
};

// Dormand-Prince 5(4) on the 2x2 frame along one segment.
Mat2 dp5_segment(const FuchsianOperator& op, cplx lambda, cplx za, cplx zb, Mat2 y,
                 const OdeTols& tols) {
    static const double c2 = 1. / 5, c3 = 3. / 10, c4 = 4. / 5, c5 = 8. / 9;
    static const double a21 = 1. / 5;
    static const double a31 = 3. / 40, a32 = 9. / 40;
    static const double a41 = 44. / 45, a42 = -56. / 15, a43 = 32. / 9;
    static const double a51 = 19372. / 6561, a52 = -25360. / 2187, a53 = 64448. / 6561,
                        a54 = -212. / 729;
    static const double a61 = 9017. / 3168, a62 = -355. / 33, a63 = 46732. / 5247, a64 = 49. / 176,
                        a65 = -5103. / 18656;
    static const double b1 = 35. / 384, b3 = 500. / 1113, b4 = 125. / 192, b5 = -2187. / 6784,
                        b6 = 11. / 84;
    static const double e1 = 71. / 57600, e3 = -71. / 16695, e4 = 71. / 1920, e5 = -17253. / 339200,
                        e6 = 22. / 525, e7 = -1. / 40;

    const cplx dir = zb - za;
    const double L = std::abs(dir);
    if (L == 0) return y;

    auto f = [&](double t, const Mat2& v) {
        cplx z = za + t * dir;
        Mat2 d;
        d(0, 0) = dir * v(1, 0);
        d(0, 1) = dir * v(1, 1);
        d(1, 0) = dir * op.rhs_second(z, lambda, v(0, 0), v(1, 0));
        d(1, 1) = dir * op.rhs_second(z, lambda, v(0, 1), v(1, 1));
        return d;
    };

    double t = 0, h = 0.1;
    Mat2 k1 = f(t, y);
    int guard = 0;
    while (t < 1.0) {
        if (++guard > 2000000) throw NumericalError(ErrorCode::StepUnderflow, "step count blowup");
        h = std::min(h, 1.0 - t);
        Mat2 k2 = f(t + c2 * h, y + (h * a21) * k1);
        Mat2 k3 = f(t + c3 * h, y + (h * a31) * k1 + (h * a32) * k2);
        Mat2 k4 = f(t + c4 * h, y + (h * a41) * k1 + (h * a42) * k2 + (h * a43) * k3);
        Mat2 k5 = f(t + c5 * h,
                    y + (h * a51) * k1 + (h * a52) * k2 + (h * a53) * k3 + (h * a54) * k4);
        Mat2 k6 = f(t + h, y + (h * a61) * k1 + (h * a62) * k2 + (h * a63) * k3 + (h * a64) * k4 +
                              (h * a65) * k5);
        Mat2 ynew = y + (h * b1) * k1 + (h * b3) * k3 + (h * b4) * k4 + (h * b5) * k5 + (h * b6) * k6;
        Mat2 k7 = f(t + h, ynew);
        Mat2 err = (h * e1) * k1 + (h * e3) * k3 + (h * e4) * k4 + (h * e5) * k5 + (h * e6) * k6 +
                   (h * e7) * k7;
        double enorm = 0;
        for (int i = 0; i < 4; ++i) {
            double sc = tols.atol + tols.rtol * std::max(std::abs(y.a[i]), std::abs(ynew.a[i]));
            enorm = std::max(enorm, std::abs(err.a[i]) / sc);
        }
        if (enorm <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7;  // FSAL
        }
        double fac = 0.9 * std::pow(std::max(enorm, 1e-10), -0.2);
        h *= std::clamp(fac, 0.2, 5.0);
        if (h < 1e-14)
            throw NumericalError(ErrorCode::StepUnderflow, "adaptive step underflow");
    }
    return y;
}

// One Taylor step: expand the frame around z0 (an ordinary point) and evaluate the
// series at z0 + h. The recurrence absorbs the stiffness exactly; accuracy is set by
// the geometric tail (h / distance-to-singularity)^K.
Mat2 taylor_segment(const FuchsianOperator& op, cplx lambda, cplx za, cplx zb, Mat2 y,
                    const OdeTols& tols) {
    const cplx dir0 = zb - za;
    const double total = std::abs(dir0);
    if (total == 0) return y;
    const cplx dir = dir0 / total;
    double done = 0;
    int guard = 0;
    while (done < total) {
        if (++guard > 200000) throw NumericalError(ErrorCode::StepUnderflow, "step count blowup");
        cplx z0 = za + done * dir;
        double rho = std::numeric_limits<double>::infinity();
        for (const cplx& p : op.finite_singularities) rho = std::min(rho, std::abs(z0 - p));
        if (!std::isfinite(rho)) rho = 1.0 + std::abs(z0);
        double h = std::min({tols.taylor_step_factor * rho, total - done, 8.0});
        if (h < 1e-14 * (1.0 + total))
            throw NumericalError(ErrorCode::StepUnderflow, "taylor step underflow");

        const Poly A = op.P.shifted(z0);
        const Poly B = op.Q.shifted(z0);
        const Poly C = (op.R - Poly::constant(lambda)).shifted(z0);
        const int dA = A.degree(), dB = B.degree(), dC = C.degree();
        const cplx a0 = A.coeff(0);

        int K = tols.taylor_terms;
        for (;;) {
            bool ok = true;
            Mat2 ynew;
            for (int col = 0; col < 2 && ok; ++col) {
                std::vector<cplx> c(K + 1);
                c[0] = y(0, col);
                c[1] = y(1, col);
                for (int k = 0; k + 2 <= K; ++k) {
                    cplx s(0);
                    for (int j = 1; j <= dA && j <= k + 2; ++j)
                        s += A.coeff(j) * (double)((k + 2 - j) * (k + 1 - j)) * c[k + 2 - j];
                    for (int j = 0; j <= dB && j <= k + 1; ++j)
                        s += B.coeff(j) * (double)(k + 1 - j) * c[k + 1 - j];
                    for (int j = 0; j <= dC && j <= k; ++j) s += C.coeff(j) * c[k - j];
                    c[k + 2] = -s / (a0 * double((k + 2) * (k + 1)));
                }
                // tail estimate at h against the magnitude scale of the series
                double scale = std::max(std::abs(c[0]), std::abs(c[1]) * h);
                double tail = 0, hk = std::pow(h, K - 2);
                for (int k = K - 2; k <= K; ++k) {
                    tail = std::max(tail, std::abs(c[k]) * hk);
                    scale = std::max(scale, std::abs(c[k]) * hk);
                    hk *= h;
                }
                if (tail > 1e-15 * std::max(scale, 1e-300)) ok = false;
                const cplx hc = h * dir;
                cplx v(0), d(0);
                for (int k = K; k >= 0; --k) v = v * hc + c[k];
                for (int k = K; k >= 1; --k) d = d * hc + double(k) * c[k];
                ynew(0, col) = v;
                ynew(1, col) = d;
            }
            if (ok) {
                y = ynew;
                break;
            }
            if (K < 3 * tols.taylor_terms) {
                K += tols.taylor_terms;
            } else {
                h *= 0.5;
                K = tols.taylor_terms;
                if (h < 1e-14 * (1.0 + total))
                    throw NumericalError(ErrorCode::StepUnderflow, "taylor step underflow");
            }
        }
        done += h;
    }
    return y;
}

}  // namespace

TransferMatrix transfer_along(const FuchsianOperator& op, cplx lambda, const PathSpec& path,
                              const OdeTols& tols) {
    if (path.waypoints.empty())
        throw NumericalError(ErrorCode::StepUnderflow, "empty path");
    check_path(path, op.finite_singularities, tols.clearance_floor);
    Mat2 y = Mat2::identity();
    for (size_t i = 0; i + 1 < path.waypoints.size(); ++i) {
        if (tols.method == OdeTols::Method::taylor)
            y = taylor_segment(op, lambda, path.waypoints[i], path.waypoints[i + 1], y, tols);
        else
            y = dp5_segment(op, lambda, path.waypoints[i], path.waypoints[i + 1], y, tols);
    }
    return TransferMatrix{y, path.waypoints.front(), path.waypoints.back()};
}

Mat2 local_frame_matrix(const std::pair<SeriesSolution, SeriesSolution>& pr, cplx w) {
    auto f1 = pr.first.frame(w);
    auto f2 = pr.second.frame(w);
    Mat2 m;
    m(0, 0) = f1[0];
    m(1, 0) = f1[1];
    m(0, 1) = f2[0];
    m(1, 1) = f2[1];
    return m;
}

Mat2 infinity_chart_to_z(cplx w, cplx s) {
    // psi_z = w^{-s} psi_w ; dpsi_z/dz = s w^{1-s} psi_w - w^{2-s} psi_w'
    cplx wms = std::exp(-s * std::log(w));
    Mat2 m;
    m(0, 0) = wms;
    m(0, 1) = cplx(0);
    m(1, 0) = s * w * wms;
    m(1, 1) = -w * w * wms;
    return m;
}

TransferMatrix match_at_singularity(const FuchsianOperator& op, const SingularPoint& p,
                                    cplx lambda, int min_terms, double r, const OdeTols& tols) {
    double rad = op.series_radius(p);
    if (!(r < rad))
        throw NumericalError(ErrorCode::SeriesDiverged, "matching radius outside series disk");
    auto pr = frobenius_solutions(op, p, lambda, min_terms, true, tols);
    // tail estimate at r
    auto tail = [&](const std::vector<cplx>& f) {
        double t = 0;
        int K = (int)f.size() - 1;
        for (int k = std::max(1, K - 2); k <= K; ++k) t = std::max(t, std::abs(f[k]) * std::pow(r, k));
        return t;
    };
    double tl = std::max(tail(pr.first.coeff), tail(pr.second.coeff));
    if (tl > 1e3 * tols.series_tol)
        throw NumericalError(ErrorCode::SeriesDiverged, "series tail " + std::to_string(tl));

    Mat2 loc = local_frame_matrix(pr, cplx(r));
    if (p.infinity) {
        Mat2 tz = infinity_chart_to_z(cplx(r), op.twist);
        loc = tz * loc;
        return TransferMatrix{loc, cplx(1.0 / r), cplx(1.0 / r)};
    }
    return TransferMatrix{loc, p.z + r, p.z + r};
}

namespace xp {

namespace {
inline cx lift(const cplx& z) { return lift_scalar(z); }
}  // namespace

XMat2 XMat2::from(const Mat2& m) {
    XMat2 r;
    for (int i = 0; i < 4; ++i) r.a[i] = lift(m.a[i]);
    return r;
}

Mat2 XMat2::to_double() const {
    Mat2 m;
    for (int i = 0; i < 4; ++i) m.a[i] = cplx((double)a[i].real(), (double)a[i].imag());
    return m;
}

XMat2 XMat2::inverse() const {
    cx d = det();
    return {{a[3] / d, -a[1] / d, -a[2] / d, a[0] / d}};
}

XMat2 operator*(const XMat2& x, const XMat2& y) {
    return {{x.a[0] * y.a[0] + x.a[1] * y.a[2], x.a[0] * y.a[1] + x.a[1] * y.a[3],
             x.a[2] * y.a[0] + x.a[3] * y.a[2], x.a[2] * y.a[1] + x.a[3] * y.a[3]}};
}

XMat2 operator*(const cx& s, const XMat2& m) {
    return {{s * m.a[0], s * m.a[1], s * m.a[2], s * m.a[3]}};
}

XMat2 taylor_transfer(const FuchsianOperator& op, cplx lambda, cplx za, cplx zb,
                      const XMat2& y0, const OdeTols& tols) {
    const cx dir0 = lift(zb) - lift(za);
    const real total = std::abs(dir0);
    XMat2 y = y0;
    if (total == 0) return y;
    const cx dir = dir0 / total;
    real done = 0;
    int guard = 0;
    while (done < total) {
        if (++guard > 200000) throw NumericalError(ErrorCode::StepUnderflow, "step count blowup");
        cx z0x = lift(za) + done * dir;
        cplx z0((double)z0x.real(), (double)z0x.imag());
        real rho = std::numeric_limits<real>::infinity();
        for (const cplx& p : op.finite_singularities)
            rho = std::min(rho, (real)std::abs(z0x - lift(p)));
        if (!std::isfinite((double)rho)) rho = 1.0L + std::abs(z0x);
        real h = std::min({(real)tols.taylor_step_factor * rho, total - done, (real)8.0L});
        if (h < 1e-14L * (1.0L + total))
            throw NumericalError(ErrorCode::StepUnderflow, "taylor step underflow");

        const Poly A = op.P.shifted(z0);
        const Poly B = op.Q.shifted(z0);
        const Poly C = (op.R - Poly::constant(lambda)).shifted(z0);
        const int dA = A.degree(), dB = B.degree(), dC = C.degree();
        if (dA > 7 || dB > 7 || dC > 7)
            throw NumericalError(ErrorCode::BadConfig, "coefficient degree out of range");
        std::array<cx, 8> Ax{}, Bx{}, Cx{};
        for (int j = 0; j <= dA; ++j) Ax[j] = lift(A.coeff(j));
        for (int j = 0; j <= dB; ++j) Bx[j] = lift(B.coeff(j));
        for (int j = 0; j <= dC; ++j) Cx[j] = lift(C.coeff(j));
        const cx a0 = Ax[0];

        int K = std::max(tols.taylor_terms, 24);
        for (;;) {
            bool ok = true;
            XMat2 ynew;
            for (int col = 0; col < 2 && ok; ++col) {
                std::vector<cx> c(K + 1);
                c[0] = y.a[0 + col];
                c[1] = y.a[2 + col];
                for (int k = 0; k + 2 <= K; ++k) {
                    cx s(0);
                    for (int j = 1; j <= dA && j <= k + 2; ++j)
                        s += Ax[j] * (real)((k + 2 - j) * (k + 1 - j)) * c[k + 2 - j];
                    for (int j = 0; j <= dB && j <= k + 1; ++j)
                        s += Bx[j] * (real)(k + 1 - j) * c[k + 1 - j];
                    for (int j = 0; j <= dC && j <= k; ++j) s += Cx[j] * c[k - j];
                    c[k + 2] = -s / (a0 * (real)((k + 2) * (k + 1)));
                }
                real scale = std::max(std::abs(c[0]), std::abs(c[1]) * h);
                real tail = 0, hk = std::pow(h, (real)(K - 2));
                for (int k = K - 2; k <= K; ++k) {
                    tail = std::max(tail, std::abs(c[k]) * hk);
                    scale = std::max(scale, std::abs(c[k]) * hk);
                    hk *= h;
                }
                if (tail > 1e-19L * std::max(scale, (real)1e-300L)) ok = false;
                const cx hc = h * dir;
                cx v(0), d(0);
                for (int k = K; k >= 0; --k) v = v * hc + c[k];
                for (int k = K; k >= 1; --k) d = d * hc + (real)k * c[k];
                ynew.a[0 + col] = v;
                ynew.a[2 + col] = d;
            }
            if (ok) {
                y = ynew;
                break;
            }
            if (K < 4 * tols.taylor_terms) {
                K += tols.taylor_terms;
            } else {
                h *= 0.5L;
                K = std::max(tols.taylor_terms, 24);
                if (h < 1e-14L * (1.0L + total))
                    throw NumericalError(ErrorCode::StepUnderflow, "taylor step underflow");
            }
        }
        done += h;
    }
    return y;
}

namespace {

// (value, derivative) of one Frobenius solution at w, evaluated in long double
std::array<cx, 2> series_frame_xp(const SeriesSolution& s, cx w) {
    cx f(0), fp(0);
    for (size_t k = s.coeff.size(); k-- > 0;) f = f * w + lift(s.coeff[k]);
    for (size_t k = s.coeff.size(); k-- > 1;) fp = fp * w + (real)k * lift(s.coeff[k]);
    cx lw = std::log(w);
    cx wr = std::exp(lift(s.exponent) * lw);
    cx val = wr * f;
    cx der = wr / w * (lift(s.exponent) * f + w * fp);
    if (s.has_log) {
        cx g(0), gp(0);
        for (size_t k = s.log_coeff.size(); k-- > 0;) g = g * w + lift(s.log_coeff[k]);
        for (size_t k = s.log_coeff.size(); k-- > 1;) gp = gp * w + (real)k * lift(s.log_coeff[k]);
        cx wr2 = std::exp(lift(s.log_exponent) * lw);
        cx lf = lift(s.log_factor);
        val += lf * lw * wr2 * g;
        der += lf * (wr2 / w * g + lw * wr2 / w * (lift(s.log_exponent) * g + w * gp));
    }
    return {val, der};
}

}  // namespace

XMat2 local_frame_matrix_xp(const std::pair<SeriesSolution, SeriesSolution>& pr, cplx w) {
    auto f1 = series_frame_xp(pr.first, lift(w));
    auto f2 = series_frame_xp(pr.second, lift(w));
    return {{f1[0], f2[0], f1[1], f2[1]}};
}

XMat2 infinity_chart_to_z_xp(cplx w, cplx s) {
    cx wx = lift(w), sx = lift(s);
    cx wms = std::exp(-sx * std::log(wx));
    return {{wms, cx(0), sx * wx * wms, -wx * wx * wms}};
}

}  // namespace xp

cplx integrate_q_over_p(const FuchsianOperator& op, const PathSpec& path) {
    // 32-point Gauss-Legendre per segment
    static const double xs[16] = {
        0.0483076656877383162, 0.1444719615827964934, 0.2392873622521370745,
        0.3318686022821276497, 0.4213512761306353454, 0.5068999089322293900,
        0.5877157572407623290, 0.6630442669302152009, 0.7321821187402896804,
        0.7944837959679424069, 0.8493676137325699701, 0.8963211557660521240,
        0.9349060759377396892, 0.9647622555875064308, 0.9856115115452683354,
        0.9972638618494815635};
    static const double ws[16] = {
        0.0965400885147278006, 0.0956387200792748594, 0.0938443990808045654,
        0.0911738786957638847, 0.0876520930044038111, 0.0833119242269467552,
        0.0781938957870703065, 0.0723457941088485062, 0.0658222227763618468,
        0.0586840934785355471, 0.0509980592623761762, 0.0428358980222266807,
        0.0342738629130214331, 0.0253920653092620595, 0.0162743947309056706,
        0.0070186100094700966};
    cplx total(0);
    for (size_t i = 0; i + 1 < path.waypoints.size(); ++i) {
        cplx a = path.waypoints[i], b = path.waypoints[i + 1];
        cplx half = (b - a) / 2.0, mid = (a + b) / 2.0;
        for (int k = 0; k < 16; ++k) {
            for (double sgn : {-1.0, 1.0}) {
                cplx z = mid + sgn * xs[k] * half;
                total += ws[k] * half * (op.Q(z) / op.P(z));
            }
        }
    }
    return total;
}

}  // namespace darboux

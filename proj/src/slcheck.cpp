#include "darboux/slcheck.hpp"

#include <algorithm>
#include <cmath>

namespace darboux {

FuchsianOperator takhtajan_operator(double x) {
    DarbouxParams p;
    p.a0 = p.ax = p.a1 = p.ainf = cplx(0);
    p.s = cplx(-1);
    p.x = cplx(x);
    return build_operator(p);
}

namespace {

// frame of the log partner with the branch log|w| (real on both sides of the cut)
std::array<cplx, 2> real_log_frame(const SeriesSolution& s, cplx w,
                                   const SeriesSolution& pure) {
    auto f = s.frame(w);
    if (s.has_log && w.real() < 0 && std::abs(w.imag()) < 1e-14) {
        // principal log(w) = log|w| + i pi on the negative axis
        auto g = pure.frame(w);
        f[0] -= s.log_factor * kI * kPi * g[0];
        f[1] -= s.log_factor * kI * kPi * g[1];
    }
    return f;
}

// coefficients (A, B) of v in the local real-log frame: v = A*psi_pure + B*psi_log
std::array<cplx, 2> decompose(const std::pair<SeriesSolution, SeriesSolution>& pr, cplx w,
                              const std::array<cplx, 2>& v) {
    auto c1 = pr.first.frame(w);
    auto c2 = real_log_frame(pr.second, w, pr.first);
    Mat2 y{{c1[0], c2[0], c1[1], c2[1]}};
    Mat2 yi = y.inverse();
    return {yi(0, 0) * v[0] + yi(0, 1) * v[1], yi(1, 0) * v[0] + yi(1, 1) * v[1]};
}

double normalized_log_coeff(const std::pair<SeriesSolution, SeriesSolution>& pr, cplx w,
                            const std::array<cplx, 2>& v) {
    auto ab = decompose(pr, w, v);
    double scale = std::sqrt(std::norm(ab[0]) + std::norm(ab[1]));
    if (scale == 0) return 0;
    cplx m = ab[1] / scale;
    return m.real();
}

}  // namespace

double shoot(SlProblem problem, double x, double lambda, const SlConfig& cfg) {
    if (!(x > 0 && x < 1))
        throw NumericalError(ErrorCode::BadConfig, "x must lie in (0,1)");
    FuchsianOperator op = takhtajan_operator(x);
    const cplx lam(lambda, 0);
    const double gap0 = std::min(x, 1.0);
    const double gapx = std::min(x, 1.0 - x);
    const double gap1 = std::min(1.0 - x, 1.0);
    const double r0 = 0.3 * gap0, rx = 0.3 * gapx, r1 = 0.3 * gap1;

    auto pr0 = frobenius_solutions(op, {cplx(0), false}, lam, 8, true, cfg.ode);
    auto prx = frobenius_solutions(op, {cplx(x), false}, lam, 8, true, cfg.ode);
    auto pr1 = frobenius_solutions(op, {cplx(1), false}, lam, 8, true, cfg.ode);

    if (problem == SlProblem::P1) {
        // regular at 0, read the log coefficient at x from the left
        auto v = pr0.first.frame(cplx(r0));
        Mat2 t = transfer_along(op, lam, {{cplx(r0), cplx(x - rx)}, 0.0}, cfg.ode).m;
        auto vx = t.apply(v);
        return normalized_log_coeff(prx, cplx(-rx), vx);
    }
    if (problem == SlProblem::P2) {
        // regular at 1, read the log coefficient at x from the right
        auto v = pr1.first.frame(cplx(-r1));
        Mat2 t = transfer_along(op, lam, {{cplx(1.0 - r1), cplx(x + rx)}, 0.0}, cfg.ode).m;
        auto vx = t.apply(v);
        return normalized_log_coeff(prx, cplx(rx), vx);
    }
    // P3: continue the regular-at-0 solution to 1, passing x above and below
    auto v = pr0.first.frame(cplx(r0));
    double rho = 0.5 * gapx;
    std::vector<cplx> above{cplx(r0), cplx(x) - rho, cplx(x) + kI * rho, cplx(x) + rho,
                            cplx(1.0 - r1)};
    std::vector<cplx> below{cplx(r0), cplx(x) - rho, cplx(x) - kI * rho, cplx(x) + rho,
                            cplx(1.0 - r1)};
    auto vp = transfer_along(op, lam, {above, 0.0}, cfg.ode).m.apply(v);
    auto vm = transfer_along(op, lam, {below, 0.0}, cfg.ode).m.apply(v);
    std::array<cplx, 2> sum{vp[0] + vm[0], vp[1] + vm[1]};
    return normalized_log_coeff(pr1, cplx(-r1), sum);
}

std::vector<double> real_spectrum(SlProblem problem, double x, double lo, double hi,
                                  const SlConfig& cfg) {
    std::vector<double> roots;
    if (!(hi > lo)) return roots;
    double prev_l = lo, prev_v = shoot(problem, x, lo, cfg);
    for (double l = lo + cfg.grid_step; prev_l < hi; l += cfg.grid_step) {
        l = std::min(l, hi);
        double v = shoot(problem, x, l, cfg);
        if (std::isfinite(prev_v) && std::isfinite(v) && prev_v * v < 0) {
            double a = prev_l, b = l, fa = prev_v;
            for (int it = 0; it < cfg.max_bisect && (b - a) > cfg.refine_tol; ++it) {
                double mid = (a + b) / 2, fm = shoot(problem, x, mid, cfg);
                if (fa * fm <= 0) {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            roots.push_back((a + b) / 2);
        }
        prev_l = l;
        prev_v = v;
        if (l >= hi) break;
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace darboux

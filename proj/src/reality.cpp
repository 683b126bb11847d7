#include "darboux/reality.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace darboux {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

std::array<double, 4> HermitianForm::coords() const {
    return {h(0, 0).real(), h(1, 1).real(), kSqrt2 * h(0, 1).real(), kSqrt2 * h(0, 1).imag()};
}

HermitianForm HermitianForm::from_coords(const std::array<double, 4>& v) {
    HermitianForm f;
    f.h(0, 0) = v[0];
    f.h(1, 1) = v[1];
    f.h(0, 1) = cplx(v[2] / kSqrt2, v[3] / kSqrt2);
    f.h(1, 0) = std::conj(f.h(0, 1));
    return f;
}

std::pair<int, int> HermitianForm::signature(double tol) const {
    double a = h(0, 0).real(), d = h(1, 1).real();
    double off = std::abs(h(0, 1));
    double tr = a + d, disc = std::sqrt((a - d) * (a - d) / 4.0 + off * off);
    double e1 = tr / 2.0 + disc, e2 = tr / 2.0 - disc;
    int pos = (e1 > tol) + (e2 > tol);
    int neg = (e1 < -tol) + (e2 < -tol);
    return {pos, neg};
}

DetectorResult invariant_form(const std::vector<Mat2>& ms, const DetectorTols& tols) {
    const int rows = 4 * (int)ms.size();
    Eigen::MatrixXd A(rows, 4);
    for (int j = 0; j < 4; ++j) {
        std::array<double, 4> e{};
        e[j] = 1.0;
        HermitianForm basis = HermitianForm::from_coords(e);
        for (size_t k = 0; k < ms.size(); ++k) {
            Mat2 out = ms[k].adjointH() * basis.h * ms[k] - basis.h;
            HermitianForm of;
            of.h = out;
            auto c = of.coords();
            for (int r = 0; r < 4; ++r) A(4 * (int)k + r, j) = c[r];
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    Eigen::VectorXd sv = svd.singularValues();
    DetectorResult res;
    res.singular_values.assign(sv.data(), sv.data() + sv.size());
    std::sort(res.singular_values.begin(), res.singular_values.end());
    res.dmin = res.singular_values.front();
    res.dmin_rel = res.singular_values.back() > 0 ? res.dmin / res.singular_values.back() : 0.0;
    Eigen::VectorXd v = svd.matrixV().col(3);
    std::array<double, 4> coords{v(0), v(1), v(2), v(3)};
    HermitianForm f = HermitianForm::from_coords(coords);
    // fix the overall sign: positive trace, tie broken by the off-diagonal
    double tr = f.h(0, 0).real() + f.h(1, 1).real();
    if (tr < -1e-12 || (std::abs(tr) <= 1e-12 && coords[2] < 0)) {
        for (auto& c : coords) c = -c;
        f = HermitianForm::from_coords(coords);
    }
    res.form = f;
    const double smax = std::max(res.singular_values.back(), 1e-300);
    double kernel_gate = std::max(tols.degeneracy_tol, 2.0 * res.dmin_rel);
    res.kernel_dim = 0;
    for (double s : res.singular_values)
        if (s / smax <= kernel_gate) ++res.kernel_dim;
    res.signature = f.signature();
    return res;
}

RealityDetector::RealityDetector(const DarbouxParams& params, MonodromyConfig mcfg,
                                 DetectorTols tols)
    : params_(params), op_(build_operator(params)), mcfg_(std::move(mcfg)), tols_(tols) {}

const MonodromyRep& RealityDetector::monodromy(cplx lambda) const {
    std::pair<double, double> key{lambda.real(), lambda.imag()};
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    MonodromyRep rep = compute_monodromy(op_, lambda, mcfg_, &params_);
    std::lock_guard<std::mutex> lk(mu_);
    auto [it, inserted] = cache_.emplace(key, std::move(rep));
    return it->second;
}

DetectorResult RealityDetector::detect(cplx lambda) const {
    const MonodromyRep& rep = monodromy(lambda);
    std::vector<Mat2> ms{rep.M_norm[rep.idx0], rep.M_norm[rep.idxx], rep.M_norm[rep.idx1]};
    return invariant_form(ms, tols_);
}

DetectorResult detect_operator(const FuchsianOperator& op, cplx lambda,
                               const MonodromyConfig& mcfg, const DetectorTols& tols) {
    MonodromyRep rep = compute_monodromy(op, lambda, mcfg);
    std::vector<Mat2> ms;
    for (const Mat2& m : rep.M) {
        cplx d = std::sqrt(m.det());
        ms.push_back((1.0 / d) * m);
    }
    return invariant_form(ms, tols);
}

std::pair<cplx, double> refine_minimum(const std::function<double(cplx)>& f, cplx seed,
                                       double scale, int max_iters) {
    // deterministic Nelder-Mead on (Re, Im)
    struct Pt {
        cplx z;
        double v;
    };
    std::array<Pt, 3> s{Pt{seed, f(seed)}, Pt{seed + scale, f(seed + scale)},
                        Pt{seed + kI * scale, f(seed + kI * scale)}};
    auto order = [&] {
        std::sort(s.begin(), s.end(), [](const Pt& a, const Pt& b) { return a.v < b.v; });
    };
    order();
    for (int it = 0; it < max_iters; ++it) {
        cplx centroid = (s[0].z + s[1].z) / 2.0;
        cplx refl = centroid + (centroid - s[2].z);
        double fr = f(refl);
        if (fr < s[0].v) {
            cplx exp_pt = centroid + 2.0 * (centroid - s[2].z);
            double fe = f(exp_pt);
            s[2] = fe < fr ? Pt{exp_pt, fe} : Pt{refl, fr};
        } else if (fr < s[1].v) {
            s[2] = Pt{refl, fr};
        } else {
            cplx con = centroid + 0.5 * (s[2].z - centroid);
            double fc = f(con);
            if (fc < s[2].v) {
                s[2] = Pt{con, fc};
            } else {
                s[1].z = s[0].z + 0.5 * (s[1].z - s[0].z);
                s[1].v = f(s[1].z);
                s[2].z = s[0].z + 0.5 * (s[2].z - s[0].z);
                s[2].v = f(s[2].z);
            }
        }
        order();
        double diam = std::max(std::abs(s[1].z - s[0].z), std::abs(s[2].z - s[0].z));
        if (diam < 1e-11 * (1.0 + std::abs(s[0].z)) || s[0].v < 1e-13) break;
    }
    return {s[0].z, s[0].v};
}

namespace {

void parallel_for(int n, int workers, const std::function<void(int)>& body) {
    workers = std::max(1, workers);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n) return;
                body(i);
            }
        });
    for (auto& t : pool) t.join();
}

}  // namespace

std::vector<SpectralPoint> scan_spectrum(const RealityDetector& det, const ScanConfig& cfg,
                                         ScanDiagnostics* diag) {
    const int nr = std::max(2, cfg.n_re), ni = std::max(2, cfg.n_im);
    const double dre = (cfg.window.re_max - cfg.window.re_min) / (nr - 1);
    const double dim = (cfg.window.im_max - cfg.window.im_min) / (ni - 1);
    auto cell = [&](int i, int j) {
        return cplx(cfg.window.re_min + j * dre, cfg.window.im_min + i * dim);
    };

    std::vector<double> grid(nr * ni, 0.0);
    parallel_for(nr * ni, cfg.workers, [&](int idx) {
        int i = idx / nr, j = idx % nr;
        grid[idx] = det.detect(cell(i, j)).dmin_rel;
    });

    // local minima below seed_tol
    std::vector<cplx> seeds;
    auto at = [&](int i, int j) { return grid[i * nr + j]; };
    for (int i = 0; i < ni; ++i)
        for (int j = 0; j < nr; ++j) {
            double v = at(i, j);
            if (v >= cfg.tols.seed_tol) continue;
            bool is_min = true;
            for (int di = -1; di <= 1 && is_min; ++di)
                for (int dj = -1; dj <= 1 && is_min; ++dj) {
                    if (!di && !dj) continue;
                    int ii = i + di, jj = j + dj;
                    if (ii < 0 || jj < 0 || ii >= ni || jj >= nr) continue;
                    if (at(ii, jj) < v) is_min = false;
                }
            if (is_min) seeds.push_back(cell(i, j));
        }

    std::vector<std::pair<cplx, double>> refined(seeds.size());
    double scale = std::max(dre, dim) / 3.0;
    parallel_for((int)seeds.size(), cfg.workers, [&](int k) {
        refined[k] = refine_minimum([&](cplx z) { return det.detect(z).dmin_rel; }, seeds[k],
                                    scale, cfg.max_refine_iters);
    });

    // dedupe within the merge radius, deepest minimum wins
    std::sort(refined.begin(), refined.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        if (a.first.real() != b.first.real()) return a.first.real() < b.first.real();
        return a.first.imag() < b.first.imag();
    });
    std::vector<std::pair<cplx, double>> kept;
    for (const auto& cand : refined) {
        bool dup = false;
        for (const auto& k : kept)
            if (std::abs(cand.first - k.first) <
                cfg.tols.merge_coeff * (1.0 + std::abs(cand.first)))
                dup = true;
        if (!dup) kept.push_back(cand);
    }

    std::vector<SpectralPoint> out;
    int accepted = 0;
    for (const auto& [z, v] : kept) {
        DetectorResult r = det.detect(z);
        bool ok = r.dmin_rel < cfg.tols.accept_tol && r.kernel_dim == 1 &&
                  r.signature == std::pair<int, int>{1, 1} &&
                  r.form.det_abs() > cfg.tols.det_floor;
        if (!ok) continue;
        ++accepted;
        SpectralPoint sp;
        sp.lambda = z;
        sp.dmin = r.dmin;
        sp.form = r.form;
        sp.kernel_dim = r.kernel_dim;
        sp.signature = r.signature;
        sp.multiplicity = 1;
        out.push_back(sp);
    }
    std::sort(out.begin(), out.end(), [](const SpectralPoint& a, const SpectralPoint& b) {
        double ra = std::abs(a.lambda), rb = std::abs(b.lambda);
        if (std::abs(ra - rb) > 1e-12 * (1.0 + ra)) return ra < rb;
        return std::arg(a.lambda) < std::arg(b.lambda);
    });

    if (diag) {
        diag->grid_dmin = std::move(grid);
        diag->seeds = (int)seeds.size();
        diag->refined = (int)refined.size();
        diag->accepted = accepted;
    }
    return out;
}

OkamotoReport okamoto_reality_check(const GaudinData& base, const std::vector<cplx>& mu1_values,
                                    const MonodromyConfig& mcfg, const DetectorTols& tols) {
    OkamotoReport rep;
    for (cplx mu1 : mu1_values) {
        GaudinData g = base;
        g.mu1 = mu1;
        auto [params, lambda] = gaudin_to_darboux(g);
        RealityDetector det(params, mcfg, tols);
        double dd = det.detect(lambda).dmin_rel;
        FuchsianOperator oper = build_oper(g);
        double dop = detect_operator(oper, cplx(0), mcfg, tols).dmin_rel;
        OkamotoEntry e{mu1, lambda, dd, dop, dd < tols.flag_tol, dop < tols.flag_tol};
        rep.entries.push_back(e);
        if (e.flag_darboux == e.flag_oper) ++rep.agreements;
    }
    rep.agreement_rate =
        rep.entries.empty() ? 1.0 : double(rep.agreements) / double(rep.entries.size());
    return rep;
}

std::vector<int> weyl_count(const std::vector<SpectralPoint>& points,
                            const std::vector<double>& radii) {
    std::vector<int> counts;
    for (double r : radii) {
        int c = 0;
        for (const auto& p : points)
            if (std::abs(p.lambda) <= r) ++c;
        counts.push_back(c);
    }
    return counts;
}

}  // namespace darboux

#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include "darboux/monodromy.hpp"

namespace darboux {

// 2x2 Hermitian invariant form, Frobenius-normalized.
struct HermitianForm {
    Mat2 h = Mat2::zero();
    std::array<double, 4> coords() const;  // (h00, h11, sqrt2*Re h01, sqrt2*Im h01)
    static HermitianForm from_coords(const std::array<double, 4>& v);
    std::pair<int, int> signature(double tol = 1e-9) const;
    double det_abs() const { return std::abs(h.det()); }
};

struct DetectorTols {
    double accept_tol = 1e-7;
    double seed_tol = 1e-3;
    double merge_coeff = 1e-5;    // merge radius = merge_coeff * (1 + |lambda|)
    double degeneracy_tol = 1e-9;
    double det_floor = 1e-6;
    double flag_tol = 1e-5;       // reality yes/no threshold for cross-checks
};

struct DetectorResult {
    double dmin = 0;      // smallest singular value of the stacked system
    double dmin_rel = 0;  // dmin / largest singular value (acceptance gates use this)
    HermitianForm form;
    int kernel_dim = 0;
    std::pair<int, int> signature{0, 0};
    std::vector<double> singular_values;  // ascending
};

// Smallest singular value of the stacked real-linear system H -> M^dag H M - H over
// the 4-dimensional real space of Hermitian forms, one block per matrix.
DetectorResult invariant_form(const std::vector<Mat2>& unimodular,
                              const DetectorTols& tols = DetectorTols{});

struct SpectralPoint {
    cplx lambda{};
    double dmin = 0;
    HermitianForm form;
    int kernel_dim = 1;
    std::pair<int, int> signature{1, 1};
    int multiplicity = 1;
    double eig_residual = -1;  // negative: not evaluated
    double l2_norm = -1;
};

// Reality detector for the elliptic Darboux family; monodromy cached per lambda.
class RealityDetector {
public:
    RealityDetector(const DarbouxParams& params, MonodromyConfig mcfg = MonodromyConfig{},
                    DetectorTols tols = DetectorTols{});

    DetectorResult detect(cplx lambda) const;
    const MonodromyRep& monodromy(cplx lambda) const;  // cached
    const DarbouxParams& params() const { return params_; }
    const FuchsianOperator& op() const { return op_; }
    const DetectorTols& tols() const { return tols_; }
    const MonodromyConfig& config() const { return mcfg_; }

private:
    DarbouxParams params_;
    FuchsianOperator op_;
    MonodromyConfig mcfg_;
    DetectorTols tols_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<double, double>, MonodromyRep> cache_;
};

// Detector for a generic operator (trigonometric, oper): raw loop matrices are
// brought to SL2 by dividing by the principal sqrt of their determinant.
DetectorResult detect_operator(const FuchsianOperator& op, cplx lambda,
                               const MonodromyConfig& mcfg = MonodromyConfig{},
                               const DetectorTols& tols = DetectorTols{});

struct ScanWindow {
    double re_min, re_max, im_min, im_max;
};

struct ScanConfig {
    ScanWindow window{-10, 10, -10, 10};
    int n_re = 64, n_im = 64;
    int workers = 1;
    int max_refine_iters = 160;
    DetectorTols tols{};
};

struct ScanDiagnostics {
    std::vector<double> grid_dmin;  // row-major, n_im rows of n_re
    int seeds = 0;
    int refined = 0;
    int accepted = 0;
};

// Grid + deterministic simplex refinement + dedupe; output sorted by (|L|, arg L).
std::vector<SpectralPoint> scan_spectrum(const RealityDetector& det, const ScanConfig& cfg,
                                         ScanDiagnostics* diag = nullptr);

// Nelder-Mead refinement of d(lambda) from a seed (exposed for reuse/tests).
std::pair<cplx, double> refine_minimum(const std::function<double(cplx)>& f, cplx seed,
                                       double scale, int max_iters);

struct OkamotoEntry {
    cplx mu1, lambda;
    double dmin_darboux, dmin_oper;
    bool flag_darboux, flag_oper;
};

struct OkamotoReport {
    std::vector<OkamotoEntry> entries;
    int agreements = 0;
    double agreement_rate = 1.0;
};

// Compares the reality flags of the reduced Darboux operator and the projective
// connection over a set of mu1 values (the free Gaudin eigenvalue).
OkamotoReport okamoto_reality_check(const GaudinData& base, const std::vector<cplx>& mu1_values,
                                    const MonodromyConfig& mcfg = MonodromyConfig{},
                                    const DetectorTols& tols = DetectorTols{});

// |{points : |lambda| <= r}| for each radius.
std::vector<int> weyl_count(const std::vector<SpectralPoint>& points,
                            const std::vector<double>& radii);

}  // namespace darboux

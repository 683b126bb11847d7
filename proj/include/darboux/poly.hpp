#pragma once

#include <algorithm>
#include <vector>

#include "darboux/types.hpp"

namespace darboux {

// Dense complex polynomial, coefficient k multiplies z^k. Trailing zeros trimmed lazily.
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<cplx> coeffs) : c_(std::move(coeffs)) { trim(); }
    Poly(std::initializer_list<cplx> coeffs) : c_(coeffs) { trim(); }

    static Poly constant(cplx v) { return Poly{std::vector<cplx>{v}}; }
    static Poly monic_from_roots(const std::vector<cplx>& roots) {
        std::vector<cplx> c{cplx(1)};
        for (const cplx& r : roots) {
            std::vector<cplx> n(c.size() + 1, cplx(0));
            for (size_t k = 0; k < c.size(); ++k) {
                n[k + 1] += c[k];
                n[k] -= r * c[k];
            }
            c = std::move(n);
        }
        return Poly{std::move(c)};
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for the zero poly
    bool is_zero() const { return c_.empty(); }
    cplx coeff(int k) const { return (k >= 0 && k < (int)c_.size()) ? c_[k] : cplx(0); }
    const std::vector<cplx>& coeffs() const { return c_; }

    cplx operator()(cplx z) const {
        cplx v(0);
        for (size_t k = c_.size(); k-- > 0;) v = v * z + c_[k];
        return v;
    }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly{};
        std::vector<cplx> d(c_.size() - 1);
        for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = double(k) * c_[k];
        return Poly{std::move(d)};
    }

    // Taylor shift: p(z0 + w) as a polynomial in w (synthetic division passes).
    Poly shifted(cplx z0) const {
        std::vector<cplx> r(c_);
        const size_t n = r.size();
        for (size_t i = 0; i < n; ++i)
            for (size_t k = n - 1; k > i; --k) r[k - 1] += z0 * r[k];
        return Poly{std::move(r)};
    }

    // Reversal rev_m(p)(w) = w^m p(1/w); requires m >= degree.
    Poly reversed(int m) const {
        std::vector<cplx> r(m + 1, cplx(0));
        for (int k = 0; k <= degree(); ++k) r[m - k] = coeff(k);
        return Poly{std::move(r)};
    }

    friend Poly operator+(const Poly& x, const Poly& y) {
        std::vector<cplx> r(std::max(x.c_.size(), y.c_.size()), cplx(0));
        for (size_t k = 0; k < x.c_.size(); ++k) r[k] += x.c_[k];
        for (size_t k = 0; k < y.c_.size(); ++k) r[k] += y.c_[k];
        return Poly{std::move(r)};
    }
    friend Poly operator-(const Poly& x, const Poly& y) {
        std::vector<cplx> r(std::max(x.c_.size(), y.c_.size()), cplx(0));
        for (size_t k = 0; k < x.c_.size(); ++k) r[k] += x.c_[k];
        for (size_t k = 0; k < y.c_.size(); ++k) r[k] -= y.c_[k];
        return Poly{std::move(r)};
    }
    friend Poly operator*(const Poly& x, const Poly& y) {
        if (x.is_zero() || y.is_zero()) return Poly{};
        std::vector<cplx> r(x.c_.size() + y.c_.size() - 1, cplx(0));
        for (size_t i = 0; i < x.c_.size(); ++i)
            for (size_t j = 0; j < y.c_.size(); ++j) r[i + j] += x.c_[i] * y.c_[j];
        return Poly{std::move(r)};
    }
    friend Poly operator*(cplx s, const Poly& p) {
        std::vector<cplx> r(p.c_);
        for (auto& v : r) v *= s;
        return Poly{std::move(r)};
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == cplx(0)) c_.pop_back();
    }
    std::vector<cplx> c_;
};

// Truncated power-series helpers (plain coefficient vectors, length = order+1).

// a/b mod w^n, b[0] != 0.
inline std::vector<cplx> series_divide(const std::vector<cplx>& a, const std::vector<cplx>& b, int n) {
    std::vector<cplx> q(n, cplx(0));
    for (int k = 0; k < n; ++k) {
        cplx s = (k < (int)a.size()) ? a[k] : cplx(0);
        for (int j = 1; j <= k && j < (int)b.size(); ++j) s -= b[j] * q[k - j];
        q[k] = s / b[0];
    }
    return q;
}

}  // namespace darboux

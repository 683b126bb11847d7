#include "darboux/operators.hpp"

#include <algorithm>
#include <cmath>

namespace darboux {

const char* to_string(DarbouxClass c) {
    switch (c) {
        case DarbouxClass::Reducible: return "Reducible";
        case DarbouxClass::Trigonometric: return "Trigonometric";
        case DarbouxClass::Elliptic: return "Elliptic";
        case DarbouxClass::Confluent: return "Confluent";
    }
    return "?";
}

namespace {

// roots of a polynomial of degree <= 3, with multiplicity clustering
std::vector<cplx> poly_roots(const Poly& p, double tol) {
    int d = p.degree();
    std::vector<cplx> r;
    if (d <= 0) return r;
    if (d == 1) {
        r.push_back(-p.coeff(0) / p.coeff(1));
    } else if (d == 2) {
        cplx a = p.coeff(2), b = p.coeff(1), c = p.coeff(0);
        cplx disc = std::sqrt(b * b - 4.0 * a * c);
        // stable variant
        cplx q = (std::abs(b + disc) > std::abs(b - disc)) ? -(b + disc) / 2.0 : -(b - disc) / 2.0;
        if (std::abs(q) < tol) {
            r.push_back(cplx(0));
            r.push_back(-b / a);
        } else {
            r.push_back(q / a);
            r.push_back(c / q);
        }
    } else {
        // depressed cubic via Cardano
        cplx a = p.coeff(3);
        cplx b = p.coeff(2) / a, c = p.coeff(1) / a, d0 = p.coeff(0) / a;
        cplx sh = b / 3.0;
        cplx pp = c - b * b / 3.0;
        cplx qq = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d0;
        cplx disc = std::sqrt(qq * qq / 4.0 + pp * pp * pp / 27.0);
        cplx u3 = -qq / 2.0 + disc;
        if (std::abs(u3) < tol) u3 = -qq / 2.0 - disc;
        cplx u = std::pow(u3, 1.0 / 3.0);
        const cplx w(-0.5, std::sqrt(3.0) / 2.0);
        for (int k = 0; k < 3; ++k) {
            cplx uk = u * std::pow(w, k);
            cplx root = (std::abs(uk) < tol) ? -sh : uk - pp / (3.0 * uk) - sh;
            // polish with two Newton steps
            for (int it = 0; it < 3; ++it) {
                cplx f = p(root), fp = p.derivative()(root);
                if (std::abs(fp) > tol) root -= f / fp;
            }
            r.push_back(root);
        }
    }
    return r;
}

}  // namespace

DarbouxClass classify(const Poly& P, double tol) {
    int d = P.degree();
    if (d < 1 || d > 3) return DarbouxClass::Confluent;
    double scale = 0;
    for (const auto& c : P.coeffs()) scale = std::max(scale, std::abs(c));
    std::vector<cplx> roots = poly_roots(P, 1e-14);
    // cluster into multiplicities
    std::vector<std::pair<cplx, int>> cl;
    double rscale = 1.0;
    for (const cplx& r : roots) rscale = std::max(rscale, std::abs(r));
    for (const cplx& r : roots) {
        bool merged = false;
        for (auto& [c, m] : cl)
            if (std::abs(c - r) < tol * rscale * 10) {
                c = (double(m) * c + r) / double(m + 1);
                ++m;
                merged = true;
                break;
            }
        if (!merged) cl.push_back({r, 1});
    }
    std::vector<int> orders;
    for (auto& [c, m] : cl) orders.push_back(m);
    int at_inf = 4 - d;
    if (at_inf > 0) orders.push_back(at_inf);
    std::sort(orders.begin(), orders.end(), std::greater<int>());
    for (int m : orders)
        if (m > 2) return DarbouxClass::Confluent;
    if (orders == std::vector<int>{1, 1, 1, 1}) return DarbouxClass::Elliptic;
    if (orders == std::vector<int>{2, 1, 1}) return DarbouxClass::Trigonometric;
    if (orders == std::vector<int>{2, 2}) return DarbouxClass::Reducible;
    return DarbouxClass::Confluent;
}

FuchsianOperator build_operator(const DarbouxParams& pr, cplx) {
    if (std::abs(pr.x) < 1e-12 || std::abs(pr.x - 1.0) < 1e-12)
        throw NumericalError(ErrorCode::DegeneratePosition, "x collides with 0 or 1");
    if (std::abs(pr.fuchs_residual()) > 1e-9)
        throw NumericalError(ErrorCode::ConstraintViolated,
                             "exponent tuple violates the Fuchs relation");
    const cplx x = pr.x, s = pr.s;
    Poly P = Poly::monic_from_roots({cplx(0), x, cplx(1)});
    Poly Pd = P.derivative();
    // Q interpolates Q(p) = (1 - a_p) P'(p) at p = 0, x, 1
    struct Node {
        cplx p, v;
    };
    std::array<Node, 3> nodes{Node{cplx(0), (1.0 - pr.a0) * Pd(cplx(0))},
                              Node{x, (1.0 - pr.ax) * Pd(x)},
                              Node{cplx(1), (1.0 - pr.a1) * Pd(cplx(1))}};
    Poly Q;
    for (int i = 0; i < 3; ++i) {
        std::vector<cplx> others;
        cplx denom(1);
        for (int j = 0; j < 3; ++j)
            if (j != i) {
                others.push_back(nodes[j].p);
                denom *= (nodes[i].p - nodes[j].p);
            }
        Q = Q + (nodes[i].v / denom) * Poly::monic_from_roots(others);
    }
    const cplx q2 = Q.coeff(2);
    const cplx r1 = -s * (s - 1.0 + q2);  // makes the twisted chart holomorphic at infinity
    Poly R({cplx(0), r1});

    FuchsianOperator op;
    op.P = P;
    op.Q = Q;
    op.R = R;
    op.twist = s;
    op.finite_singularities = {cplx(0), x, cplx(1)};
    op.singular_at_infinity = true;
    return op;
}

std::array<cplx, 4> read_exponents(const FuchsianOperator& op, const DarbouxParams& pr) {
    auto diff = [&](SingularPoint p) { return op.exponent_difference(p); };
    std::array<cplx, 4> out{diff({cplx(0), false}), diff({pr.x, false}), diff({cplx(1), false}),
                            diff({cplx(0), true})};
    // exponent_difference returns rho2-rho1 with Re(rho2)>=Re(rho1); align signs to the
    // requested parameters (the pair {0, a} is read back as +-a).
    std::array<cplx, 4> want{pr.a0, pr.ax, pr.a1, pr.ainf};
    for (int i = 0; i < 4; ++i)
        if (std::abs(out[i] + want[i]) < std::abs(out[i] - want[i])) out[i] = -out[i];
    return out;
}

DarbouxParams algebraic_adjoint(const DarbouxParams& pr) {
    DarbouxParams d = pr;
    d.a0 = -pr.a0;
    d.ax = -pr.ax;
    d.a1 = -pr.a1;
    d.ainf = -pr.ainf;
    d.s = -2.0 - pr.s;
    return d;
}

cplx adjoint_constant(const DarbouxParams& pr) {
    FuchsianOperator L = build_operator(pr);
    return -2.0 * (1.0 + pr.x) - L.Q.coeff(1);
}

FuchsianOperator formal_adjoint(const FuchsianOperator& op) {
    FuchsianOperator a = op;
    a.Q = 2.0 * op.P.derivative() - op.Q;
    a.R = op.P.derivative().derivative() - op.Q.derivative() + op.R;
    a.twist = -2.0 - op.twist;
    return a;
}

namespace {

// half-sum matrix acting in the order (ax, a1, a0, ainf)
std::array<cplx, 4> half_sum(const std::array<cplx, 4>& v) {
    return {(v[0] + v[1] + v[2] + v[3]) / 2.0, (-v[0] - v[1] + v[2] + v[3]) / 2.0,
            (v[0] - v[1] + v[2] - v[3]) / 2.0, (-v[0] + v[1] + v[2] - v[3]) / 2.0};
}

}  // namespace

DarbouxParams okamoto_dual(const DarbouxParams& pr) {
    std::array<cplx, 4> paper{pr.ax, pr.a1, pr.a0, pr.ainf};
    std::array<cplx, 4> d = half_sum(paper);
    DarbouxParams out = pr;
    out.ax = d[0];
    out.a1 = d[1];
    out.a0 = d[2];
    out.ainf = d[3];
    out.s = (out.a0 + out.ax + out.a1 + out.ainf) / 2.0 - 1.0;
    return out;
}

std::vector<ReducibilityWitness> reducibility_locus(const DarbouxParams& pr, double tol) {
    std::vector<ReducibilityWitness> out;
    std::array<cplx, 4> a{pr.a0, pr.ax, pr.a1, pr.ainf};
    for (int mask = 0; mask < 16; ++mask) {
        cplx hs(0);
        std::array<int, 4> signs;
        for (int i = 0; i < 4; ++i) {
            signs[i] = (mask >> i) & 1 ? -1 : 1;
            hs += 0.5 * double(signs[i]) * a[i];
        }
        double nearest = std::round(hs.real());
        if (nearest >= 1 && std::abs(hs - nearest) < tol)
            out.push_back({signs, (int)nearest});
    }
    return out;
}

std::array<cplx, 4> GaudinData::mus() const {
    cplx rhs = lambda[3] * (lambda[3] + 2.0) / 4.0;
    for (int i = 0; i < 3; ++i) rhs -= lambda[i] * (lambda[i] + 2.0) / 4.0;
    cplx m2 = rhs - x * mu1;
    cplx m3 = -mu1 - m2;
    return {mu1, m2, m3, cplx(0)};
}

cplx GaudinData::constraint_residual() const {
    auto m = mus();
    cplx lhs = lambda[3] * (lambda[3] + 2.0) / 4.0;
    cplx rhs(0);
    for (int i = 0; i < 3; ++i) rhs += lambda[i] * (lambda[i] + 2.0) / 4.0;
    rhs += x * m[0] + 1.0 * m[1] + 0.0 * m[2];
    return lhs - rhs;
}

std::pair<DarbouxParams, cplx> gaudin_to_darboux(const GaudinData& g, double tol) {
    auto m = g.mus();
    cplx relsum = m[0] + m[1] + m[2] + m[3];
    if (std::abs(relsum) > tol || std::abs(g.constraint_residual()) > tol)
        throw NumericalError(ErrorCode::ConstraintViolated, "Gaudin relations violated");
    std::array<cplx, 4> astar;
    for (int i = 0; i < 4; ++i) astar[i] = g.lambda[i] + 1.0;
    std::array<cplx, 4> a = half_sum(astar);  // (ax, a1, a0, ainf) attachment
    DarbouxParams pr;
    pr.ax = a[0];
    pr.a1 = a[1];
    pr.a0 = a[2];
    pr.ainf = a[3];
    pr.x = g.x;
    pr.s = (pr.a0 + pr.ax + pr.a1 + pr.ainf) / 2.0 - 1.0;  // equals lambda3
    cplx beta = g.beta();
    cplx Lam = g.x * (1.0 - g.x) * g.mu1 +
               0.5 * g.lambda[0] * (g.x * (2.0 * beta + g.lambda[1]) + (g.x - 1.0) * g.lambda[2]);
    return {pr, Lam};
}

FuchsianOperator build_oper(const GaudinData& g) {
    auto m = g.mus();
    std::array<cplx, 3> z{g.x, cplx(1), cplx(0)};
    Poly P = Poly::monic_from_roots({z[0], z[0], z[1], z[1], z[2], z[2]});
    Poly R;
    for (int i = 0; i < 3; ++i) {
        std::vector<cplx> other2;
        for (int j = 0; j < 3; ++j)
            if (j != i) {
                other2.push_back(z[j]);
                other2.push_back(z[j]);
            }
        Poly pij = Poly::monic_from_roots(other2);
        cplx ci = g.lambda[i] * (g.lambda[i] + 2.0) / 4.0;
        std::vector<cplx> with_zi = other2;
        with_zi.push_back(z[i]);
        R = R - ci * pij - m[i] * Poly::monic_from_roots(with_zi);
    }
    FuchsianOperator op;
    op.P = P;
    op.Q = Poly{};
    op.R = R;
    op.twist = cplx(0);
    op.finite_singularities = {z[0], z[1], z[2]};
    op.singular_at_infinity = true;
    return op;
}

FuchsianOperator build_trigonometric() {
    FuchsianOperator op;
    op.P = Poly{{cplx(-1), cplx(0), cplx(1)}};
    op.Q = Poly{{cplx(0), cplx(2)}};
    op.R = Poly{};
    op.twist = cplx(-1);
    op.finite_singularities = {cplx(-1), cplx(1)};
    op.singular_at_infinity = true;
    return op;
}

FuchsianOperator build_model_operator(cplx alpha) {
    FuchsianOperator op;
    op.P = Poly{{cplx(0), cplx(1)}};
    op.Q = Poly{{cplx(1) - alpha}};
    op.R = Poly{};
    op.twist = cplx(0);
    op.finite_singularities = {cplx(0)};
    op.singular_at_infinity = true;
    return op;
}

}  // namespace darboux

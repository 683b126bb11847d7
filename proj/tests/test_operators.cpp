#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "darboux/operators.hpp"

using namespace darboux;

namespace {

DarbouxParams params_of(cplx a0, cplx ax, cplx a1, cplx ainf, cplx x) {
    DarbouxParams p;
    p.a0 = a0;
    p.ax = ax;
    p.a1 = a1;
    p.ainf = ainf;
    p.s = (a0 + ax + a1 + ainf) / 2.0 - 1.0;
    p.x = x;
    return p;
}

}  // namespace

TEST_CASE("classification by singularity orders") {
    CHECK(classify(Poly{{cplx(0), cplx(0), cplx(1)}}) == DarbouxClass::Reducible);      // z^2
    CHECK(classify(Poly{{cplx(-1), cplx(0), cplx(1)}}) == DarbouxClass::Trigonometric); // z^2-1
    CHECK(classify(Poly::monic_from_roots({cplx(0), cplx(0.3, 0.1), cplx(1)})) ==
          DarbouxClass::Elliptic);
    CHECK(classify(Poly{{cplx(0), cplx(0), cplx(0), cplx(1)}}) == DarbouxClass::Confluent); // z^3
    // double finite root with degree 3: orders {2,1,1} up to Moebius
    CHECK(classify(Poly::monic_from_roots({cplx(1), cplx(1), cplx(0)})) ==
          DarbouxClass::Trigonometric);
    CHECK(classify(Poly{{cplx(1), cplx(2)}}) == DarbouxClass::Confluent);  // linear: order 3 at inf
}

TEST_CASE("build_operator roundtrip of exponent differences") {
    auto p = params_of(cplx(0, 0.37), cplx(0, -0.21), cplx(0, 0.11), cplx(0, 0.55), cplx(0.43, 0.08));
    FuchsianOperator op = build_operator(p);
    auto got = read_exponents(op, p);
    CHECK(std::abs(got[0] - p.a0) < 1e-12);
    CHECK(std::abs(got[1] - p.ax) < 1e-12);
    CHECK(std::abs(got[2] - p.a1) < 1e-12);
    CHECK(std::abs(got[3] - p.ainf) < 1e-12);
}

TEST_CASE("untwisted point: all exponents zero") {
    // all lambda_i = -1 gives a = 0 and indicial exponents (0,0) at the finite points
    GaudinData g;
    g.lambda = {cplx(-1), cplx(-1), cplx(-1), cplx(-1)};
    g.mu1 = cplx(0.3, 0.2);
    g.x = cplx(0.4);
    auto [pr, lam] = gaudin_to_darboux(g);
    CHECK(std::abs(pr.a0) < 1e-14);
    CHECK(std::abs(pr.ax) < 1e-14);
    CHECK(std::abs(pr.a1) < 1e-14);
    CHECK(std::abs(pr.ainf) < 1e-14);
    FuchsianOperator op = build_operator(pr);
    for (cplx p : {cplx(0), pr.x, cplx(1)}) {
        LocalModel lm = op.local_model({p, false}, lam, 4);
        CHECK(std::abs(lm.rho1) < 1e-12);
        CHECK(std::abs(lm.rho2) < 1e-12);
    }
}

TEST_CASE("prescribed exponent at zero") {
    cplx t(0, 2.0 * 0.13);
    auto p = params_of(t, -t, cplx(0), cplx(2.2), cplx(0.5));
    // Fuchs: s fixed by the tuple
    FuchsianOperator op = build_operator(p);
    LocalModel lm = op.local_model({cplx(0), false}, cplx(0), 4);
    CHECK(std::abs((lm.rho2 - lm.rho1) - t) < 1e-12);
}

TEST_CASE("gaudin reduction: half-sum attachment and accessory parameter") {
    // all a_i^* = 1: the half-sum formulas put 2 at the x-position and 0 elsewhere
    GaudinData g;
    g.lambda = {cplx(0), cplx(0), cplx(0), cplx(0)};
    g.mu1 = cplx(0.1);
    g.x = cplx(0.37);
    auto [pr, lam] = gaudin_to_darboux(g);
    CHECK(std::abs(pr.ax - 2.0) < 1e-14);
    CHECK(std::abs(pr.a0) < 1e-14);
    CHECK(std::abs(pr.a1) < 1e-14);
    CHECK(std::abs(pr.ainf) < 1e-14);
    CHECK(std::abs(pr.fuchs_residual()) < 1e-14);

    // Lambda is affine in mu1 with slope x(1-x)
    GaudinData g2 = g;
    g2.mu1 = g.mu1 + cplx(1.0);
    auto [pr2, lam2] = gaudin_to_darboux(g2);
    CHECK(std::abs((lam2 - lam) - g.x * (1.0 - g.x)) < 1e-13);
    CHECK(std::abs(pr2.ax - pr.ax) < 1e-14);
}

TEST_CASE("gaudin mus satisfy the linear relations") {
    GaudinData g;
    g.lambda = {cplx(-1, 0.3), cplx(-1, -0.2), cplx(-1, 0.5), cplx(-1, 0.6)};
    g.mu1 = cplx(0.7, -0.4);
    g.x = cplx(0.6);
    auto m = g.mus();
    CHECK(std::abs(m[0] + m[1] + m[2] + m[3]) < 1e-13);
    CHECK(std::abs(g.constraint_residual()) < 1e-13);
}

TEST_CASE("half-sum substitution: orbit structure") {
    auto p = params_of(cplx(2), cplx(0), cplx(0), cplx(0), cplx(0.5));
    p.s = cplx(0);  // Fuchs-consistent: sum = 2 = 2(s+1)
    DarbouxParams d1 = okamoto_dual(p);
    DarbouxParams d2 = okamoto_dual(d1);
    DarbouxParams d4 = okamoto_dual(okamoto_dual(d2));
    // sigma^4 = id
    for (int i = 0; i < 4; ++i) CHECK(std::abs(d4.tuple()[i] - p.tuple()[i]) < 1e-14);
    // sigma^2 = signed permutation (ax,a1,a0,ainf) -> (a0,-ainf,ax,-a1)
    CHECK(std::abs(d2.ax - p.a0) < 1e-14);
    CHECK(std::abs(d2.a1 + p.ainf) < 1e-14);
    CHECK(std::abs(d2.a0 - p.ax) < 1e-14);
    CHECK(std::abs(d2.ainf + p.a1) < 1e-14);
    // fixed point at zero
    auto z = params_of(cplx(0), cplx(0), cplx(0), cplx(0), cplx(0.5));
    auto dz = okamoto_dual(z);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(dz.tuple()[i]) < 1e-14);
    // the half-sum values of the paper-order tuple (2,0,0,0) are (1,-1,1,-1)
    auto q = params_of(cplx(0), cplx(2), cplx(0), cplx(0), cplx(0.5));
    q.s = cplx(0);
    auto dq = okamoto_dual(q);
    CHECK(std::abs(dq.ax - 1.0) < 1e-14);
    CHECK(std::abs(dq.a1 + 1.0) < 1e-14);
    CHECK(std::abs(dq.a0 - 1.0) < 1e-14);
    CHECK(std::abs(dq.ainf + 1.0) < 1e-14);
    // Fuchs relation preserved
    CHECK(std::abs(dq.fuchs_residual()) < 1e-14);
}

TEST_CASE("algebraic adjoint: involution and operator-level equality") {
    auto p = params_of(cplx(0, 0.4), cplx(0, -0.3), cplx(0, 0.2), cplx(0, 0.1), cplx(0.45, -0.1));
    DarbouxParams d = algebraic_adjoint(p);
    CHECK(std::abs(d.a0 + p.a0) < 1e-15);
    CHECK(std::abs(d.s - (-2.0 - p.s)) < 1e-15);
    DarbouxParams dd = algebraic_adjoint(d);
    CHECK(std::abs(dd.s - p.s) < 1e-15);
    CHECK(std::abs(dd.ax - p.ax) < 1e-15);

    // formal adjoint of the built operator = built dual + additive constant
    FuchsianOperator L = build_operator(p);
    FuchsianOperator Lstar = formal_adjoint(L);
    FuchsianOperator Ldual = build_operator(d);
    Poly dP = Lstar.P - Ldual.P, dQ = Lstar.Q - Ldual.Q, dR = Lstar.R - Ldual.R;
    auto max_coeff = [](const Poly& q, int from) {
        double m = 0;
        for (int k = from; k <= q.degree(); ++k) m = std::max(m, std::abs(q.coeff(k)));
        return m;
    };
    CHECK(max_coeff(dP, 0) < 1e-12);
    CHECK(max_coeff(dQ, 0) < 1e-12);
    CHECK(max_coeff(dR, 1) < 1e-12);
    CHECK(std::abs(dR.coeff(0) - adjoint_constant(p)) < 1e-12);

    // a = (0, 2it, 0, c) -> (0, -2it, 0, -c)
    auto q = params_of(cplx(0), cplx(0, 0.26), cplx(0), cplx(1.3), cplx(0.5));
    auto dq = algebraic_adjoint(q);
    CHECK(std::abs(dq.ax + q.ax) < 1e-15);
    CHECK(std::abs(dq.ainf + q.ainf) < 1e-15);
}

TEST_CASE("lame slice is preserved by the adjoint map") {
    cplx s(-1, 0.8);
    cplx ap = (s + 1.0) / 2.0;
    auto p = params_of(ap, ap, ap, ap, cplx(0.3));
    CHECK(std::abs(p.fuchs_residual()) < 1e-14);
    DarbouxParams d = algebraic_adjoint(p);
    cplx ap2 = (d.s + 1.0) / 2.0;
    for (cplx v : d.tuple()) CHECK(std::abs(v - ap2) < 1e-14);
    // and Q is proportional to P' on the slice
    FuchsianOperator L = build_operator(p);
    Poly diff = L.Q - ((1.0 - ap) * L.P.derivative());
    CHECK(diff.degree() < 0);
}

TEST_CASE("reducibility locus") {
    auto im = params_of(cplx(0, 0.4), cplx(0, 0.2), cplx(0, -0.1), cplx(0, 0.7), cplx(0.5));
    CHECK(reducibility_locus(im).empty());

    auto p = params_of(cplx(2), cplx(0), cplx(0), cplx(0), cplx(0.5));
    auto w = reducibility_locus(p);
    CHECK(!w.empty());
    CHECK(w.front().half_sum == 1);
    CHECK(w.size() == 8);  // the three free signs are arbitrary

    auto q = params_of(cplx(1), cplx(1), cplx(-1), cplx(-1), cplx(0.5));
    auto wq = reducibility_locus(q);
    bool has2 = false;
    for (auto& ww : wq) has2 = has2 || ww.half_sum == 2;
    CHECK(has2);
}

TEST_CASE("oper construction has the dual exponent differences") {
    GaudinData g;
    g.lambda = {cplx(-1, 0.4), cplx(-1, -0.25), cplx(-1, 0.3), cplx(-1, 0.45)};
    g.mu1 = cplx(0.2, 0.1);
    g.x = cplx(0.45);
    FuchsianOperator op = build_oper(g);
    std::array<cplx, 3> z{g.x, cplx(1), cplx(0)};
    for (int i = 0; i < 3; ++i) {
        cplx d = op.exponent_difference({z[i], false});
        cplx want = g.lambda[i] + 1.0;
        bool match = std::abs(d - want) < 1e-10 || std::abs(d + want) < 1e-10;
        CHECK(match);
    }
    cplx dinf = op.exponent_difference({cplx(0), true});
    cplx want = g.lambda[3] + 1.0;
    CHECK((std::abs(dinf - want) < 1e-10 || std::abs(dinf + want) < 1e-10));
}

TEST_CASE("degenerate position rejected") {
    auto p = params_of(cplx(0), cplx(0), cplx(0), cplx(0), cplx(1.0));
    p.s = cplx(-1);
    CHECK_THROWS_AS(build_operator(p), NumericalError);
}

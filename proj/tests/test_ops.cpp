#include "doctest.h"

#include <cmath>

#include "freeconv/errors.hpp"
#include "freeconv/ops.hpp"

using namespace freeconv;

namespace {
const Element X = Element::letter(1);
const Element Xs = Element::letter(1, Deco::star);
const Element Xi = Element::letter(1, Deco::inv);
const Element Xsi = Element::letter(1, Deco::starinv);

Word xn(int n) { return Word(n, Letter{1, Deco::plain}); }

Element tr_of(const Element& e) { return e.tr(); }

unsigned lcg_state = 31;
int rnd(int m) {
    lcg_state = lcg_state * 1664525u + 1013904223u;
    return int((lcg_state >> 16) % unsigned(m));
}

Element random_laurent_element(int max_degree, int terms) {
    std::vector<Letter> alphabet{{1, Deco::plain}, {1, Deco::inv}};
    Element acc;
    for (int i = 0; i < terms; ++i) {
        BasisElement b;
        int degree = 1 + rnd(max_degree);
        int outer_len = rnd(degree + 1);
        for (int j = 0; j < outer_len; ++j) b.outer.push_back(alphabet[rnd(2)]);
        int rest = degree - outer_len;
        while (rest > 0) {
            int len = 1 + rnd(rest);
            Word w;
            for (int j = 0; j < len; ++j) w.push_back(alphabet[rnd(2)]);
            b.traces.push_back(w);
            rest -= len;
        }
        b.canonicalize();
        acc += Element::basis(b, Scalar(Rational(rnd(5) - 2)));
    }
    return acc;
}

CumulantSpec random_cumulant_spec(int index, int order) {
    CumulantSpec c;
    c.max_order = order;
    Letter l{index, Deco::plain};
    for (int n = 1; n <= order; ++n) c.values[Word(n, l)] = Scalar(Rational(rnd(7) - 3));
    return c;
}

Element random_plain_element(int letters, int max_degree, int terms) {
    std::vector<Letter> alphabet;
    for (int i = 1; i <= letters; ++i) alphabet.push_back({i, Deco::plain});
    Element acc;
    for (int i = 0; i < terms; ++i) {
        BasisElement b;
        int degree = 1 + rnd(max_degree);
        int outer_len = rnd(degree + 1);
        for (int j = 0; j < outer_len; ++j) b.outer.push_back(alphabet[rnd(letters)]);
        int rest = degree - outer_len;
        while (rest > 0) {
            int len = 1 + rnd(rest);
            Word w;
            for (int j = 0; j < len; ++j) w.push_back(alphabet[rnd(letters)]);
            b.traces.push_back(w);
            rest -= len;
        }
        b.canonicalize();
        acc += Element::basis(b, Scalar(Rational(rnd(5) - 2)));
    }
    return acc;
}
}  // namespace

TEST_CASE("delta_A on the semicircular law") {
    CumulantSpec st = semicircular_spec(Scalar::t());
    Element x3 = X * X * X;
    // Delta_{S_t} X^3 = 2t X + t trX
    Element expect = X.scaled(Scalar::term(Rational(2), 1, 0)) +
                     tr_of(X).scaled(Scalar::term(Rational(1), 1, 0));
    Element d = delta_A(st, x3);
    CHECK(d == expect);
    CHECK(delta_A(st, d).is_zero());
    CHECK(delta_A(st, Element::unit()).is_zero());
}

TEST_CASE("exp of delta_A") {
    CumulantSpec st = semicircular_spec(Scalar::t());
    Element x3 = X * X * X;
    Element expect = x3 + X.scaled(Scalar::term(Rational(2), 1, 0)) +
                     tr_of(X).scaled(Scalar::term(Rational(1), 1, 0));
    CHECK(exp_delta_A(st, x3) == expect);
    CHECK(cond_exp_additive(x3, st) == expect);
    CHECK(exp_delta_A(st, Element::unit()) == Element::unit());
    // tau(S_t^4) via evaluation at zero = 2 t^2 = t^2 C_2
    Element x4 = x3 * X;
    CHECK(exp_delta_A(st, x4).at_zero() == Scalar::term(Rational(2), 2, 0));
}

TEST_CASE("delta_A degree decrease and derivation law") {
    CumulantSpec spec = random_cumulant_spec(1, 4);
    for (int rep = 0; rep < 6; ++rep) {
        Element p = random_plain_element(1, 4, 2), q = random_plain_element(1, 4, 2);
        Element dp = delta_A(spec, p);
        if (!p.is_zero() && !dp.is_zero()) CHECK(dp.degree() < p.degree());
        CHECK(delta_A(spec, p.mul_tr(q)) ==
              delta_A(spec, p).mul_tr(q) + p.mul_tr(delta_A(spec, q)));
    }
}

TEST_CASE("delta_A commutation and additivity") {
    CumulantSpec a = random_cumulant_spec(1, 4) + random_cumulant_spec(2, 4);
    CumulantSpec b = random_cumulant_spec(1, 4) + random_cumulant_spec(2, 4);
    for (int rep = 0; rep < 5; ++rep) {
        Element p = random_plain_element(2, 4, 3);
        CHECK(delta_A(a, delta_A(b, p)) == delta_A(b, delta_A(a, p)));
        CHECK(delta_A(a + b, p) == delta_A(a, p) + delta_A(b, p));
    }
}

TEST_CASE("exp delta_A is multiplicative") {
    CumulantSpec spec = random_cumulant_spec(1, 3);
    for (int rep = 0; rep < 5; ++rep) {
        Element p = random_plain_element(1, 3, 2), q = random_plain_element(1, 3, 2);
        CHECK(exp_delta_A(spec, p.mul_tr(q)) ==
              exp_delta_A(spec, p).mul_tr(exp_delta_A(spec, q)));
    }
}

TEST_CASE("D_A on the free unitary Brownian motion") {
    LogCumulantSpec ut = unitary_bm_logspec();
    Element x2 = X * X;
    // D_{tau(U_t)} X^2 = -t X^2
    CHECK(d_A_diagonal(ut, x2) == x2.scaled(Scalar::term(Rational(-1), 1, 0)));
    // D_{U_t/tau(U_t)} X^2 = -t X trX, squares to zero
    Element nil = d_A_nilpotent(ut, x2);
    CHECK(nil == X.mul_tr(X).scaled(Scalar::term(Rational(-1), 1, 0)));
    CHECK(d_A_nilpotent(ut, nil).is_zero());
    CHECK(d_A(ut, x2) == d_A_diagonal(ut, x2) + d_A_nilpotent(ut, x2));

    // e^{D_{U_t}} X^2 = e^{-2t}(X^2 - t X trX)
    Element expect = x2.scaled(Scalar::exp_half(-4)) -
                     X.mul_tr(X).scaled(Scalar::term(Rational(1), 1, -4));
    CHECK(exp_d_A(ut, x2) == expect);
    CHECK(cond_exp_multiplicative(x2, ut) == expect);
}

TEST_CASE("D_A requires order-1 log values") {
    LogCumulantSpec incomplete;
    incomplete.max_order = 2;
    incomplete.values[xn(2)] = Scalar(1);
    CHECK_THROWS_AS(d_A(incomplete, X * X), normalization_error);
}

TEST_CASE("propcom: diagonal and nilpotent parts commute") {
    LogCumulantSpec a, b;
    a.max_order = b.max_order = 3;
    for (int n = 1; n <= 3; ++n) {
        a.values[xn(n)] = Scalar(Rational(rnd(5) - 2));
        b.values[xn(n)] = Scalar(Rational(rnd(5) - 2));
    }
    for (int rep = 0; rep < 5; ++rep) {
        Element p = random_plain_element(1, 4, 3);
        // D_{tau(A)}, D_{tau(B)}, D_{A/tau(A)} pairwise commute
        CHECK(d_A_diagonal(a, d_A_diagonal(b, p)) == d_A_diagonal(b, d_A_diagonal(a, p)));
        CHECK(d_A_diagonal(b, d_A_nilpotent(a, p)) == d_A_nilpotent(a, d_A_diagonal(b, p)));
        CHECK(d_A(a, p) == d_A_diagonal(a, p) + d_A_nilpotent(a, p));
    }
}

TEST_CASE("D_A derivation law") {
    LogCumulantSpec ut = unitary_bm_logspec();
    for (int rep = 0; rep < 5; ++rep) {
        Element p = random_plain_element(1, 3, 2), q = random_plain_element(1, 3, 2);
        CHECK(d_A(ut, p.mul_tr(q)) == d_A(ut, p).mul_tr(q) + p.mul_tr(d_A(ut, q)));
    }
}

TEST_CASE("delta_U basics") {
    Element x2 = X * X;
    // delta_U X^2 = -2 X^2 - 2 X trX
    CHECK(delta_U(x2) == x2.scaled(Scalar(-2)) - X.mul_tr(X).scaled(Scalar(2)));
    // delta_U(X^-1 X) = 0
    CHECK(delta_U(Xi * X).is_zero());
    CHECK(delta_U(Element::unit()).is_zero());
    // (t/2) delta_U = D_{U_t} on C{X}: agreement on X^3
    Element x3 = x2 * X;
    LogCumulantSpec ut = unitary_bm_logspec();
    CHECK(delta_U(x3).scaled(Scalar::term(Rational(1, 2), 1, 0)) == d_A(ut, x3));
    // multi-variable input rejected
    CHECK_THROWS_AS(delta_U(X * Element::letter(2)), scope_error);
}

TEST_CASE("delta_GL basics") {
    // vanishes on C{X} and C{X^-1}
    CHECK(delta_GL(X * X * X).is_zero());
    CHECK(delta_GL(Xi * Xi).is_zero());
    CHECK(delta_GL((X * Xi).tr()).is_zero());
    // delta_GL(X* X) = 4 X* X (adjacent mixed pair, empty bracket)
    CHECK(delta_GL(Xs * X) == (Xs * X).scaled(Scalar(4)));
    // delta_GL(X X*) = 4 tr(X X*)
    CHECK(delta_GL(X * Xs) == (X * Xs).tr().scaled(Scalar(4)));
}

TEST_CASE("derivation law for the unitary family") {
    for (int rep = 0; rep < 5; ++rep) {
        Element p = random_laurent_element(3, 2), q = random_laurent_element(3, 2);
        CHECK(delta_U(p.mul_tr(q)) == delta_U(p).mul_tr(q) + p.mul_tr(delta_U(q)));
        CHECK(delta_GL(p.mul_tr(q)) == delta_GL(p).mul_tr(q) + p.mul_tr(delta_GL(q)));
    }
}

TEST_CASE("E-subspace operators") {
    CHECK(in_E_subspace(X * Xi * Xs));
    CHECK_FALSE(in_E_subspace(Xs * X));
    CHECK_THROWS_AS(delta_U_plus(Xs * X), scope_error);
    // delta_U = delta_GL/2 + delta_U^+ + delta_U^- on P Q* words
    for (int n = 0; n <= 2; ++n)
        for (int m = 0; m <= 2; ++m) {
            if (n + m == 0) continue;
            Element pq = X.pow(n) * (m == 0 ? Element::unit() : Xi.pow(m)).star();
            Element lhs = delta_U(pq);
            Element rhs = delta_GL(pq).scaled(Scalar(Rational(1, 2))) + delta_U_plus(pq) +
                          delta_U_minus(pq);
            CHECK(lhs == rhs);
        }
}

TEST_CASE("E-subspace commutation and exponential split") {
    // random E elements of degree <= 4: products of Laurent monomials times
    // starred Laurent monomials
    auto random_E = [&]() {
        Element acc;
        for (int terms = 0; terms < 2; ++terms) {
            int n = rnd(3), m = rnd(3 - std::min(2, n));
            Element w = (n ? X.pow(n - 1) * (rnd(2) ? X : Xi) : Element::unit());
            Element v = (m ? (rnd(2) ? X : Xi).pow(m) : Element::unit());
            Element pq = w * v.star();
            acc += (rnd(2) ? pq : pq.tr()).scaled(Scalar(Rational(rnd(5) - 2)));
        }
        return acc;
    };
    for (int rep = 0; rep < 6; ++rep) {
        Element e = random_E();
        REQUIRE(in_E_subspace(e));
        CHECK(delta_GL(delta_U_plus(e)) == delta_U_plus(delta_GL(e)));
        CHECK(delta_GL(delta_U_minus(e)) == delta_U_minus(delta_GL(e)));
        CHECK(delta_U_plus(delta_U_minus(e)) == delta_U_minus(delta_U_plus(e)));
        CHECK(delta_U(e) == delta_GL(e).scaled(Scalar(Rational(1, 2))) + delta_U_plus(e) +
                                delta_U_minus(e));
    }
}

TEST_CASE("gradient brackets and tilde operators") {
    Word x1 = xn(1);
    // <nabla_U X, nabla_U X> = -X^2
    CHECK(grad_bracket_U(x1, x1) == (X * X).scaled(Scalar(-1)));
    // tilde delta vanishes without trace factors
    CHECK(tilde_delta_U(X * X * X).is_zero());
    // tilde delta_U(X trX) = 2 <nabla X, nabla X> = -2 X^2
    CHECK(tilde_delta_U(X.mul_tr(X)) == (X * X).scaled(Scalar(-2)));
    // tilde delta_U((trX)^2) = -2 tr(X^2)
    Element trx = X.tr();
    CHECK(tilde_delta_U(trx * trx) == (X * X).tr().scaled(Scalar(-2)));
    CHECK_THROWS_AS(tilde_delta_U(Xs.tr() * Xs.tr()), scope_error);
}

TEST_CASE("grad_bracket_GL value") {
    Word x1 = xn(1);
    Word xs1{Letter{1, Deco::star}};
    // first factor: remove bracket (X, X*) entirely -> empty; second factor:
    // wrap bracket empty -> X* X ... compute expected by hand:
    // i=1 (X: r=1), j=1' (X*: l=1): bracket = X X*, first remainder empty;
    // wrap bracket = X*^{r=0} ... X^{l=0} -> empty: second remainder = X* X
    CHECK(grad_bracket_GL(x1, xs1) == (Xs * X).scaled(Scalar(2)));
}

TEST_CASE("structure equation for tilde operators on random elements") {
    // the two-sum structure: outer-vs-trace terms carry weight 2, ordered
    // trace pairs weight 1; checked through linearity over random elements
    for (int rep = 0; rep < 4; ++rep) {
        Element p = random_laurent_element(3, 2);
        Element q = random_laurent_element(2, 1);
        // tilde(p trq) expands per the structure equation
        Element lhs = tilde_delta_U(p.mul_tr(q));
        Element rhs;
        for (const auto& [b, c] : p.mul_tr(q).terms())
            rhs += tilde_delta_U(Element::basis(b, c));
        CHECK(lhs == rhs);
    }
}

TEST_CASE("exact triangular exponential on delta_U") {
    // e^{(t/2) delta_U} X = e^{-t/2} X
    CHECK(exp_half_t_delta_U(X) == X.scaled(Scalar::exp_half(-1)));
    // (e^{(t/2) delta_U} X^n)(1) = tau(U_t^n), n <= 8
    Element xp = Element::unit();
    for (int n = 1; n <= 8; ++n) {
        xp *= X;
        CHECK(exp_half_t_delta_U(xp).at_one() == unitary_bm_moment(n));
    }
    // unitarity: (e^{(t/2) delta_U}(X X*))(1) = 1
    CHECK(exp_half_t_delta_U(X * Xs).at_one() == Scalar(1));
}

TEST_CASE("exact exponential on delta_GL") {
    // e^{(t/4) delta_GL} fixes C{X}: tau(G_t^n) = 1
    for (int n = 1; n <= 4; ++n) CHECK(exp_quarter_t_delta_GL(X.pow(n)).at_one() == Scalar(1));
    // |G_t|^2 = e^t
    CHECK(exp_quarter_t_delta_GL(X * Xs).at_one() == Scalar::exp_half(2));
}

TEST_CASE("exponential split on the E subspace") {
    // e^{(t/2) delta_U} = e^{(t/4) delta_GL} e^{(t/2) delta_U^+} e^{(t/2) delta_U^-} on E
    auto exp_plus = [](const Element& p) {
        return exp_triangular(op_function(OpId::delta_u_plus), Rational(1, 2), p);
    };
    auto exp_minus = [](const Element& p) {
        return exp_triangular(op_function(OpId::delta_u_minus), Rational(1, 2), p);
    };
    std::vector<Element> samples{X * Xs, X * X * Xsi, Xi * Xs, (X * Xs).tr() * X,
                                 X.pow(2) * Xs.pow(2)};
    for (const auto& e : samples) {
        REQUIRE(in_E_subspace(e));
        Element lhs = exp_half_t_delta_U(e);
        Element rhs = exp_quarter_t_delta_GL(exp_plus(exp_minus(e)));
        CHECK(lhs == rhs);
    }
}

TEST_CASE("triangularity scan of graded blocks") {
    std::set<Letter> laurent{{1, Deco::plain}, {1, Deco::inv}};
    for (int d = 1; d <= 5; ++d) {
        const GradedBlock& blk = GradedBlock::get(laurent, d);
        OperatorMatrix M = OperatorMatrix::materialize(OpId::delta_u, blk);
        CHECK(M.triangular);
    }
    std::set<Letter> four{{1, Deco::plain}, {1, Deco::inv}, {1, Deco::star}, {1, Deco::starinv}};
    for (int d = 1; d <= 3; ++d) {
        CHECK(OperatorMatrix::materialize(OpId::delta_u, GradedBlock::get(four, d)).triangular);
        CHECK(OperatorMatrix::materialize(OpId::delta_gl, GradedBlock::get(four, d)).triangular);
    }
    // the corrected generator is not triangular (trace counts decrease)
    const GradedBlock& blk = GradedBlock::get(laurent, 3);
    CHECK_FALSE(OperatorMatrix::materialize(OpId::finite_n_u, blk, 2).triangular);
}

TEST_CASE("exp_operator: exact vs taylor cross-check") {
    std::set<Letter> plain{{1, Deco::plain}};
    const GradedBlock& blk = GradedBlock::get(plain, 3);
    // e^{0 op} = identity
    ExpMatrix zero = exp_operator(OpId::delta_u, Rational(0), blk, ExpMode::taylor);
    for (size_t j = 0; j < blk.basis.size(); ++j) {
        REQUIRE(zero.cols[j].size() == 1);
        CHECK(zero.cols[j][0].first == int(j));
        CHECK(zero.cols[j][0].second == Scalar(1));
    }
    // exact at t substituted = taylor at t = 1 within tol
    ExpMatrix exact = exp_operator(OpId::delta_u, Rational(1, 2), blk, ExpMode::exact);
    Rational tol = ratio(1, mpz_class("1000000000000"));
    ExpMatrix taylor = exp_operator(OpId::delta_u, Rational(1, 2), blk, ExpMode::taylor, tol);
    for (size_t j = 0; j < blk.basis.size(); ++j) {
        std::map<int, double> ex, ty;
        for (const auto& [i, s] : exact.cols[j]) ex[i] = s.eval(1.0);
        for (const auto& [i, s] : taylor.cols[j]) ty[i] = s.substitute(1).eval(1.0);
        for (const auto& [i, v] : ex) CHECK(std::abs(v - ty[i]) < 1e-10);
    }
    // exact mode on a non-triangular operator is rejected
    CHECK_THROWS_AS(
        exp_operator(OpId::finite_n_u, Rational(1, 2), blk, ExpMode::exact, tol, 2),
        argument_error);
}

TEST_CASE("finite-N expectations") {
    Rational t(1);
    // p = X: e^{-t/2} at every N (tilde correction vanishes)
    for (int N : {1, 2, 4}) {
        Scalar v = finite_N_expectation_U(X, t, N);
        CHECK(std::abs(v.eval(1.0) - std::exp(-0.5)) < 1e-12);
    }
    // p = tr(X* X), GL case: e^{t} for every N
    Element trxsx = (Xs * X).tr();
    for (int N : {1, 2, 4}) {
        Scalar v = finite_N_expectation_GL(trxsx, t, N);
        CHECK(std::abs(v.eval(1.0) - std::exp(1.0)) < 1e-12);
    }
    // p = tr(X^2), U case: N -> infinity recovers tau(U_t^2)
    Element trx2 = (X * X).tr();
    double limit = unitary_bm_moment(2).eval(1.0);
    double prev = 1e9;
    for (int N : {2, 4, 8}) {
        double v = finite_N_expectation_U(trx2, t, N).eval(1.0);
        CHECK(std::abs(v - limit) < prev);
        prev = std::abs(v - limit);
    }
    CHECK(prev < 1e-2);
}

TEST_CASE("convergence table rates") {
    Element trx2 = (X * X).tr();
    auto rows = convergence_table(trx2, MatrixGroup::unitary, Rational(1), {2, 4, 8, 16});
    for (size_t i = 0; i + 1 < rows.size(); ++i) {
        double ratio = rows[i].abs_diff / rows[i + 1].abs_diff;
        CHECK(ratio > 3.5);
        CHECK(ratio < 4.5);
    }
    // no trace interactions: all differences 0
    auto flat = convergence_table(X, MatrixGroup::unitary, Rational(1), {2, 4});
    for (const auto& row : flat) CHECK(row.abs_diff < 1e-25);
}

TEST_CASE("conditional expectation consistency with cumulant addition") {
    // tau(e^{Delta_A}P at B) = tau(P(A+B)) computed from cumulant addition
    CumulantSpec ka = random_cumulant_spec(1, 4);
    CumulantSpec kb = random_cumulant_spec(1, 4);
    MomentFunctional mb = cumulants_to_moments(kb, 4);
    CumulantSpec ksum = ka + kb;
    MomentFunctional msum = cumulants_to_moments(ksum, 4);
    for (int n = 1; n <= 4; ++n) {
        Element p = X.pow(n);
        Element moved = exp_delta_A(ka, p);
        CHECK(mb.expectation(moved) == msum.moment(xn(n)));
    }
}

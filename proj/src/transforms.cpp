#include "freeconv/transforms.hpp"

#include "freeconv/errors.hpp"

namespace freeconv {

std::vector<Rational> tchebycheff2(int n) {
    if (n < 0) throw argument_error("negative polynomial degree");
    std::vector<Rational> prev{Rational(1)};       // T_0
    if (n == 0) return prev;
    std::vector<Rational> cur{Rational(0), Rational(1)};  // T_1
    for (int k = 1; k < n; ++k) {
        std::vector<Rational> next(k + 2, Rational(0));
        for (size_t i = 0; i < cur.size(); ++i) next[i + 1] += cur[i];
        for (size_t i = 0; i < prev.size(); ++i) next[i] -= prev[i];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

namespace {
// [z^j] exp(c z/(1-z)) with c = m t: sum_k (mt)^k/k! binom(j-1, k-1)
Scalar laguerre_coeff(int j, int m) {
    if (j == 0) return Scalar(1);
    Scalar acc;
    Rational fact(1);
    for (int k = 1; k <= j; ++k) {
        fact *= k;
        mpz_class binom;
        mpz_bin_uiui(binom.get_mpz_t(), j - 1, k - 1);
        if (binom == 0) continue;
        Rational c = Rational(binom) / fact;
        mpz_class mk = 1;
        for (int i = 0; i < k; ++i) mk *= m;
        acc += Scalar::term(c * Rational(mk), k, 0);  // (mt)^k binom / k!
    }
    return acc;
}
}  // namespace

std::vector<Scalar> hall_poly(int n) {
    if (n < 0) throw argument_error("negative polynomial degree");
    std::vector<Scalar> coeffs(n + 1);
    // e^{mt/2} [z^{n-m}] exp(mt z/(1-z)) on x^m; the m = 0 term only hits n = 0
    for (int m = 1; m <= n; ++m) coeffs[m] = Scalar::exp_half(m) * laguerre_coeff(n - m, m);
    if (n == 0) coeffs[0] = Scalar(1);
    return coeffs;
}

Element poly_apply(const std::vector<Rational>& coeffs, const Element& x) {
    Element acc, power = Element::unit();
    for (size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i] != 0) acc += power.scaled(Scalar(coeffs[i]));
        if (i + 1 < coeffs.size()) power *= x;
    }
    return acc;
}

Element poly_apply_scalar(const std::vector<Scalar>& coeffs, const Element& x) {
    Element acc, power = Element::unit();
    for (size_t i = 0; i < coeffs.size(); ++i) {
        if (!coeffs[i].is_zero()) acc += power.scaled(coeffs[i]);
        if (i + 1 < coeffs.size()) power *= x;
    }
    return acc;
}

Element segal_bargmann(const Element& p, int family_size) {
    for (const auto& l : p.letters()) {
        if (l.deco != Deco::plain)
            throw scope_error("segal_bargmann expects plain s-letters");
        if (l.index < 1 || l.index > family_size)
            throw scope_error("letter index outside the declared family");
    }
    // orthonormal semicircular table: kappa(s_i^e, s_j^e') = [i == j]
    CumulantSpec semi;
    semi.max_order = 2;
    for (int i = 1; i <= family_size; ++i)
        for (Deco a : {Deco::plain, Deco::star})
            for (Deco b : {Deco::plain, Deco::star})
                semi.values[Word{Letter{i, a}, Letter{i, b}}] = Scalar(1);
    Element moved = exp_delta_A(semi, p);
    // circular moments: kappa(c_i, c_j*) = kappa(c_i*, c_j) = [i == j]
    CumulantSpec circ;
    circ.max_order = 2;
    for (int i = 1; i <= family_size; ++i) {
        circ.values[Word{Letter{i, Deco::plain}, Letter{i, Deco::star}}] = Scalar(1);
        circ.values[Word{Letter{i, Deco::star}, Letter{i, Deco::plain}}] = Scalar(1);
    }
    return factorize(moved, [&](const Word& w) { return moment_from_cumulants(circ, w); });
}

Element hall_transform(const Element& p) {
    for (const auto& l : p.letters())
        if (l.deco == Deco::star || l.deco == Deco::starinv)
            throw scope_error("hall_transform expects plain/inverse letters only");
    return exp_half_t_delta_U(p);
}

Element g_t(const Element& p) {
    for (const auto& l : p.letters())
        if (l.deco == Deco::star || l.deco == Deco::starinv)
            throw scope_error("g_t expects plain/inverse letters only");
    // tau(Q(G_t)) = Q(1) on C{X} and C{X^-1}: every Laurent word has moment 1
    return factorize(p, [](const Word&) { return Scalar(1); });
}

Scalar l2_norm_sq_U(const Element& p) {
    return exp_half_t_delta_U(p * p.star()).at_one();
}

Scalar l2_norm_sq_G(const Element& p) {
    return exp_quarter_t_delta_GL(p * p.star()).at_one();
}

}  // namespace freeconv

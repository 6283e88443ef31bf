#pragma once

#include "freeconv/ops.hpp"

namespace freeconv {

// Tchebycheff polynomials of the second kind: T_0 = 1, T_1 = x,
// T_{n+1} = x T_n - T_{n-1}; rational coefficients, degree exactly n.
std::vector<Rational> tchebycheff2(int n);

// Biane polynomials P_n^t from the corrected generating series
//   sum_n z^n P_n^t(x) = 1 / (1 - z e^{(t/2)(1+z)/(1-z)} x);
// coefficient of x^m is e^{mt/2} [z^{n-m}] exp(mt z/(1-z)), expanded exactly
// via [z^j] exp(c z/(1-z)) = sum_k c^k/k! binom(j-1, k-1).
std::vector<Scalar> hall_poly(int n);

// Substitute an Element for x in a coefficient list (degree ascending).
Element poly_apply(const std::vector<Rational>& coeffs, const Element& x);
Element poly_apply_scalar(const std::vector<Scalar>& coeffs, const Element& x);

// Free Segal-Bargmann transform on polynomials: e^{Delta_s} with the
// orthonormal-family semicircular table, then factorization through the
// circular moments; the result is a trace-free polynomial.
Element segal_bargmann(const Element& p, int family_size);

// Free Hall transform at the C{X,X^-1} level: e^{(t/2) delta_U} p, exact.
// Inputs must use only plain and inverse decorations.
Element hall_transform(const Element& p);

// Factorization of a Laurent-polynomial image through the G_t distribution
// (every Laurent word has moment 1).
Element g_t(const Element& p);

// L2 norms through the heat semigroups:
//   |p(U_t)|^2 = (e^{(t/2) delta_U}(p p*))(1)
//   |p(G_t)|^2 = (e^{(t/4) delta_GL}(p p*))(1)
Scalar l2_norm_sq_U(const Element& p);
Scalar l2_norm_sq_G(const Element& p);

}  // namespace freeconv

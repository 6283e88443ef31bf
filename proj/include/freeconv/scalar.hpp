#pragma once

#include <gmpxx.h>

#include <map>
#include <string>
#include <vector>

#include "freeconv/errors.hpp"

namespace freeconv {

using Rational = mpq_class;

// mpq_class(num, den) does not canonicalize; this does.
inline Rational ratio(const mpz_class& num, const mpz_class& den) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

/// Exact coefficient ring of the engine: finite sums
///
///     sum_k  p_k(t) * e^{k t/2},   k integer,  p_k in Q[t].
///
/// The functions e^{kt/2} are linearly independent over Q[t], so structural
/// equality (after pruning zero polynomials) is semantic equality.  The ring
/// is closed under +, *, d/dt, and under the operator exponentials used
/// elsewhere in the engine.
class Scalar {
  public:
    using Poly = std::vector<Rational>;  // dense coefficients, low to high

    Scalar() = default;
    Scalar(long v);
    Scalar(const Rational& v);

    static Scalar t();               // the formal variable t
    static Scalar exp_half(long k);  // e^{k t / 2}
    static Scalar term(const Rational& c, int tpow, long k);

    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    Scalar& operator*=(const Scalar& o);
    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(const Scalar& a, const Scalar& b);
    bool operator==(const Scalar& o) const { return terms_ == o.terms_; }
    bool operator!=(const Scalar& o) const { return !(*this == o); }
    bool operator<(const Scalar& o) const { return terms_ < o.terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_one() const;
    bool is_rational() const;           // pure constant, no t, no exponential
    Rational as_rational() const;       // throws unless is_rational()

    Scalar derivative() const;          // d/dt

    // Substitute a rational value for t.  The result stays in the ring (the
    // exponentials become e^{k q/2}, kept on the same integer lattice), so q
    // must satisfy k*q integral for every exponent k present.
    Scalar substitute(const Rational& q) const;

    double eval(double tval) const;

    // Complex conjugation; coefficients are rational, so this is the identity.
    Scalar conj() const { return *this; }

    // Invertible elements are the monomials c * e^{kt/2}, c != 0.
    bool invertible() const;
    Scalar inverse() const;

    // Rational upper bound for |value| at t = 1 (used by the Taylor-mode tail
    // bound after substitution; exponents bound e^{1/2} from above).
    Rational magnitude_bound_at_one() const;

    // log of an invertible element when it lands back in the ring:
    // log(e^{kt/2}) = k t/2, log(1) = 0; anything else is rejected.
    Scalar log() const;

    const std::map<long, Poly>& terms() const { return terms_; }

    std::string str() const;                       // grammar form, exp(k*t/2)
    std::string pretty(bool t_substituted = false) const;  // e^{...} display

  private:
    std::map<long, Poly> terms_;
    void prune();
};

Scalar operator*(const Rational& c, const Scalar& s);

}  // namespace freeconv

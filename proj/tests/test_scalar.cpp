#include "doctest.h"

#include <cmath>

#include "freeconv/scalar.hpp"

using namespace freeconv;

TEST_CASE("scalar ring arithmetic and structural equality") {
    Scalar a = Scalar::term(Rational(3, 4), 2, -2);  // 3/4 t^2 e^{-t}
    Scalar b = Scalar::t() * Scalar::t() * Scalar(Rational(3, 4)) * Scalar::exp_half(-2);
    CHECK(a == b);
    CHECK((a - b).is_zero());
    CHECK(a + Scalar(0) == a);
    CHECK(Scalar(1) * a == a);

    CHECK(Scalar::exp_half(3) * Scalar::exp_half(-5) == Scalar::exp_half(-2));

    // zero polynomials pruned: t - t vanishes structurally
    CHECK((Scalar::t() - Scalar::t()).terms().empty());
}

TEST_CASE("scalar derivative") {
    // d/dt [t^2 e^{-t}] = 2t e^{-t} - t^2 e^{-t}
    Scalar s = Scalar::term(Rational(1), 2, -2);
    Scalar expect = Scalar::term(Rational(2), 1, -2) - Scalar::term(Rational(1), 2, -2);
    CHECK(s.derivative() == expect);
    CHECK(Scalar(5).derivative().is_zero());
}

TEST_CASE("scalar numeric evaluation") {
    Scalar s = Scalar::term(Rational(1), 1, -2);  // t e^{-t}
    CHECK(s.eval(1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(s.eval(0.0) == doctest::Approx(0.0));
}

TEST_CASE("scalar substitution stays on the lattice") {
    Scalar s = Scalar::term(Rational(1), 1, -2);  // t e^{-t}
    Scalar at1 = s.substitute(1);
    CHECK(at1 == Scalar::exp_half(-2));
    CHECK_THROWS_AS(Scalar::exp_half(1).substitute(Rational(1, 3)), argument_error);
    // polynomial-only scalars substitute at any rational
    CHECK(Scalar::t().substitute(Rational(1, 3)) == Scalar(Rational(1, 3)));
}

TEST_CASE("scalar inversion and log") {
    Scalar m = Scalar::term(Rational(2), 0, -1);  // 2 e^{-t/2}
    CHECK(m.invertible());
    CHECK(m * m.inverse() == Scalar(1));
    CHECK_FALSE((Scalar(1) + Scalar::t()).invertible());

    CHECK(Scalar::exp_half(-1).log() == Scalar::term(Rational(-1, 2), 1, 0));
    CHECK(Scalar(1).log().is_zero());
    CHECK_THROWS_AS(Scalar(2).log(), normalization_error);
}

TEST_CASE("scalar formatting") {
    Scalar s = Scalar::exp_half(-2) - Scalar::t() * Scalar::exp_half(-2);
    CHECK(s.str() == "exp(-2*t/2) - t*exp(-2*t/2)");
    CHECK(s.pretty() == "e^{-t}*(1 - t)");
    CHECK(Scalar().str() == "0");
}

#pragma once

#include <optional>
#include <string>

#include "freeconv/algebra.hpp"

namespace freeconv {

// Expression grammar (CLI and JSON):
//   atoms        X1, X1*, X1^-1, X1*^-1   (bare X means X1)
//   scalars      integers, rationals a/b, t, exp(k*t/2) with integer k
//   polynomials  Tk(expr)  -- Tchebycheff II applied to the argument
//   operators    + - juxtaposition-or-* for products, ^n integer powers
//   traces       tr(expr)
// A '*' directly attached to an X atom is the star decoration; elsewhere it
// is multiplication.  format_element emits canonical text that reparses to
// an equal Element.
Element parse_expression(const std::string& text);

// Word syntax used by JSON spec tables: space-separated atoms, e.g. "X1 X1*".
Word parse_word(const std::string& text);
std::string format_word(const Word& w);

std::string format_element(const Element& p);  // canonical, reparseable

// Display form: e^{...} scalars, optionally after substituting t.
std::string format_element_pretty(const Element& p,
                                  const std::optional<Rational>& tval = std::nullopt);

}  // namespace freeconv

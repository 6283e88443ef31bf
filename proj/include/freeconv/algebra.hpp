#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "freeconv/scalar.hpp"

namespace freeconv {

// Decorations of an indeterminate.  The derived attributes used by the
// unitary/linear transition operators are pure functions of the decoration.
enum class Deco : std::uint8_t { plain = 0, star = 1, inv = 2, starinv = 3 };

Deco deco_star(Deco d);     // involution: plain<->star, inv<->starinv
Deco deco_inverse(Deco d);  // plain<->inv, star<->starinv

struct Letter {
    int index = 1;
    Deco deco = Deco::plain;

    auto operator<=>(const Letter&) const = default;
};

// Word order used for canonical trace sorting: by length, then lexicographic
// on (index, decoration rank) with plain < star < inv < starinv.
using Word = std::vector<Letter>;

struct WordLess {
    bool operator()(const Word& a, const Word& b) const;
};

int word_degree(const Word& w);

// Canonical basis element  M0 tr(M1) ... tr(Mn): an outer word and a sorted
// multiset of non-unit trace words.  The unit trace tr(1)=1 is absorbed into
// the coefficient and never stored.
struct BasisElement {
    Word outer;
    std::vector<Word> traces;  // sorted under WordLess

    void canonicalize();
    int degree() const;
    int trace_count() const { return int(traces.size()); }

    bool operator==(const BasisElement&) const = default;
    bool operator<(const BasisElement& o) const;
};

// Finite linear combination of basis elements with nonzero Scalar
// coefficients.  Immutable value semantics; all operations are pure.
class Element {
  public:
    Element() = default;
    explicit Element(const Scalar& c);  // c * 1

    static Element unit() { return Element(Scalar(1)); }
    static Element letter(int index, Deco d = Deco::plain);
    static Element word(const Word& w);
    static Element basis(const BasisElement& b, const Scalar& c = Scalar(1));

    Element operator-() const;
    Element& operator+=(const Element& o);
    Element& operator-=(const Element& o);
    friend Element operator+(Element a, const Element& b) { return a += b; }
    friend Element operator-(Element a, const Element& b) { return a -= b; }
    friend Element operator*(const Element& a, const Element& b);
    Element& operator*=(const Element& o) { return *this = *this * o; }
    bool operator==(const Element&) const = default;

    Element scaled(const Scalar& c) const;
    friend Element operator*(const Scalar& c, const Element& p) { return p.scaled(c); }

    // The formal expectation: M0 trM1...trMn  |->  tr(M0) trM1...trMn.
    Element tr() const;

    // Second associative product  p ._tr q = p tr(q).
    Element mul_tr(const Element& q) const;

    // Antilinear involution: reverses words, swaps decorations, distributes
    // over trace factors; coefficients here are real so it is linear.
    Element star() const;

    // Cancels adjacent pairs X X^-1, X^-1 X, X* X*^-1, X*^-1 X* inside every
    // word until none remain.  Sound for every evaluation.
    Element reduce_inverses() const;

    int degree() const;  // max degree over basis terms; 0 for the zero element
    bool is_zero() const { return combo_.empty(); }
    std::size_t term_count() const { return combo_.size(); }

    // Evaluation at zero / at one: all indeterminates replaced by 0 resp. 1
    // and tr by the identity on scalars.
    Scalar at_zero() const;
    Scalar at_one() const;

    Scalar coefficient(const BasisElement& b) const;
    const std::map<BasisElement, Scalar>& terms() const { return combo_; }

    std::set<Letter> letters() const;
    std::set<int> indices() const;

    // Integer power; negative exponents require a single pure-word term with
    // coefficient 1 and expand to inverse letters in reverse order.
    Element pow(long n) const;

    Element substitute_t(const Rational& q) const;

  private:
    std::map<BasisElement, Scalar> combo_;
    void add_term(const BasisElement& b, const Scalar& c);
    friend class ElementBuilder;
};

// Accumulates terms without intermediate normalization.
class ElementBuilder {
  public:
    void add(const BasisElement& b, const Scalar& c);
    void add(const Element& e, const Scalar& c = Scalar(1));
    Element take();

  private:
    std::map<BasisElement, Scalar> acc_;
};

}  // namespace freeconv

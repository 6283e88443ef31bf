#include "freeconv/algebra.hpp"

#include <algorithm>

#include "freeconv/errors.hpp"

namespace freeconv {

Deco deco_star(Deco d) {
    switch (d) {
        case Deco::plain: return Deco::star;
        case Deco::star: return Deco::plain;
        case Deco::inv: return Deco::starinv;
        case Deco::starinv: return Deco::inv;
    }
    return Deco::plain;
}

Deco deco_inverse(Deco d) {
    switch (d) {
        case Deco::plain: return Deco::inv;
        case Deco::star: return Deco::starinv;
        case Deco::inv: return Deco::plain;
        case Deco::starinv: return Deco::star;
    }
    return Deco::plain;
}

bool WordLess::operator()(const Word& a, const Word& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

int word_degree(const Word& w) { return int(w.size()); }

void BasisElement::canonicalize() {
    std::erase_if(traces, [](const Word& w) { return w.empty(); });
    std::sort(traces.begin(), traces.end(), WordLess{});
}

int BasisElement::degree() const {
    int d = word_degree(outer);
    for (const auto& w : traces) d += word_degree(w);
    return d;
}

bool BasisElement::operator<(const BasisElement& o) const {
    WordLess less;
    if (outer != o.outer) return less(outer, o.outer);
    if (traces.size() != o.traces.size()) return traces.size() < o.traces.size();
    for (size_t i = 0; i < traces.size(); ++i)
        if (traces[i] != o.traces[i]) return less(traces[i], o.traces[i]);
    return false;
}

Element::Element(const Scalar& c) {
    if (!c.is_zero()) combo_[BasisElement{}] = c;
}

Element Element::letter(int index, Deco d) {
    BasisElement b;
    b.outer = {Letter{index, d}};
    return basis(b);
}

Element Element::word(const Word& w) {
    BasisElement b;
    b.outer = w;
    return basis(b);
}

Element Element::basis(const BasisElement& b, const Scalar& c) {
    Element e;
    if (!c.is_zero()) {
        BasisElement bb = b;
        bb.canonicalize();
        e.combo_[bb] = c;
    }
    return e;
}

void Element::add_term(const BasisElement& b, const Scalar& c) {
    if (c.is_zero()) return;
    auto it = combo_.find(b);
    if (it == combo_.end()) {
        combo_.emplace(b, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) combo_.erase(it);
    }
}

Element Element::operator-() const {
    Element r = *this;
    for (auto& [b, c] : r.combo_) c = -c;
    return r;
}

Element& Element::operator+=(const Element& o) {
    for (const auto& [b, c] : o.combo_) add_term(b, c);
    return *this;
}

Element& Element::operator-=(const Element& o) {
    for (const auto& [b, c] : o.combo_) add_term(b, -c);
    return *this;
}

Element operator*(const Element& a, const Element& b) {
    // On basis terms the outer words concatenate and trace multisets merge.
    Element r;
    for (const auto& [ba, ca] : a.combo_)
        for (const auto& [bb, cb] : b.combo_) {
            BasisElement m;
            m.outer = ba.outer;
            m.outer.insert(m.outer.end(), bb.outer.begin(), bb.outer.end());
            m.traces = ba.traces;
            m.traces.insert(m.traces.end(), bb.traces.begin(), bb.traces.end());
            m.canonicalize();
            r.add_term(m, ca * cb);
        }
    return r;
}

Element Element::scaled(const Scalar& c) const {
    Element r;
    if (c.is_zero()) return r;
    for (const auto& [b, coeff] : combo_) r.add_term(b, coeff * c);
    return r;
}

Element Element::tr() const {
    Element r;
    for (const auto& [b, c] : combo_) {
        BasisElement m;
        m.traces = b.traces;
        if (!b.outer.empty()) m.traces.push_back(b.outer);
        m.canonicalize();
        r.add_term(m, c);
    }
    return r;
}

Element Element::mul_tr(const Element& q) const { return *this * q.tr(); }

namespace {
Word word_star(const Word& w) {
    Word r(w.rbegin(), w.rend());
    for (auto& l : r) l.deco = deco_star(l.deco);
    return r;
}

bool cancels(const Letter& a, const Letter& b) {
    return a.index == b.index && b.deco == deco_inverse(a.deco);
}

Word word_reduce(Word w) {
    // stack-based adjacent cancellation
    Word out;
    for (const auto& l : w) {
        if (!out.empty() && cancels(out.back(), l))
            out.pop_back();
        else
            out.push_back(l);
    }
    return out;
}
}  // namespace

Element Element::star() const {
    Element r;
    for (const auto& [b, c] : combo_) {
        BasisElement m;
        m.outer = word_star(b.outer);
        for (const auto& t : b.traces) m.traces.push_back(word_star(t));
        m.canonicalize();
        r.add_term(m, c.conj());
    }
    return r;
}

Element Element::reduce_inverses() const {
    Element r;
    for (const auto& [b, c] : combo_) {
        BasisElement m;
        m.outer = word_reduce(b.outer);
        for (const auto& t : b.traces) m.traces.push_back(word_reduce(t));
        m.canonicalize();
        r.add_term(m, c);
    }
    return r;
}

int Element::degree() const {
    int d = 0;
    for (const auto& [b, c] : combo_) d = std::max(d, b.degree());
    return d;
}

Scalar Element::at_zero() const {
    auto it = combo_.find(BasisElement{});
    return it == combo_.end() ? Scalar() : it->second;
}

Scalar Element::at_one() const {
    Scalar s;
    for (const auto& [b, c] : combo_) s += c;
    return s;
}

Scalar Element::coefficient(const BasisElement& b) const {
    auto it = combo_.find(b);
    return it == combo_.end() ? Scalar() : it->second;
}

std::set<Letter> Element::letters() const {
    std::set<Letter> s;
    for (const auto& [b, c] : combo_) {
        for (const auto& l : b.outer) s.insert(l);
        for (const auto& t : b.traces)
            for (const auto& l : t) s.insert(l);
    }
    return s;
}

std::set<int> Element::indices() const {
    std::set<int> s;
    for (const auto& l : letters()) s.insert(l.index);
    return s;
}

Element Element::pow(long n) const {
    if (n == 0) return unit();
    Element base = *this;
    if (n < 0) {
        if (combo_.size() != 1) throw argument_error("negative power of a non-monomial");
        const auto& [b, c] = *combo_.begin();
        if (!b.traces.empty() || !c.is_one())
            throw argument_error("negative power requires a pure word with coefficient 1");
        Word w(b.outer.rbegin(), b.outer.rend());
        for (auto& l : w) l.deco = deco_inverse(l.deco);
        base = word(w);
        n = -n;
    }
    Element r = unit();
    for (long i = 0; i < n; ++i) r *= base;
    return r;
}

Element Element::substitute_t(const Rational& q) const {
    Element r;
    for (const auto& [b, c] : combo_) r.add_term(b, c.substitute(q));
    return r;
}

void ElementBuilder::add(const BasisElement& b, const Scalar& c) {
    if (c.is_zero()) return;
    auto it = acc_.find(b);
    if (it == acc_.end())
        acc_.emplace(b, c);
    else
        it->second += c;
}

void ElementBuilder::add(const Element& e, const Scalar& c) {
    for (const auto& [b, coeff] : e.terms()) add(b, coeff * c);
}

Element ElementBuilder::take() {
    Element r;
    for (auto& [b, c] : acc_)
        if (!c.is_zero()) r.combo_.emplace(b, std::move(c));
    acc_.clear();
    return r;
}

}  // namespace freeconv

#include "freeconv/scalar.hpp"

#include <cmath>
#include <sstream>

namespace freeconv {

namespace {

void poly_trim(Scalar::Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

Scalar::Poly poly_add(const Scalar::Poly& a, const Scalar::Poly& b) {
    Scalar::Poly r(std::max(a.size(), b.size()), Rational(0));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    poly_trim(r);
    return r;
}

Scalar::Poly poly_mul(const Scalar::Poly& a, const Scalar::Poly& b) {
    if (a.empty() || b.empty()) return {};
    Scalar::Poly r(a.size() + b.size() - 1, Rational(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    poly_trim(r);
    return r;
}

std::string rat_str(const Rational& r) { return r.get_str(); }

// "3/4*t^2" style; sign handled by caller when lead is true
std::string mono_str(const Rational& c, size_t pow) {
    std::string s;
    Rational a = abs(c);
    bool coeff_one = (a == 1);
    if (pow == 0 || !coeff_one) s = rat_str(a);
    if (pow >= 1) {
        if (!s.empty()) s += "*";
        s += "t";
        if (pow >= 2) s += "^" + std::to_string(pow);
    }
    return s;
}

}  // namespace

Scalar::Scalar(long v) {
    if (v != 0) terms_[0] = Poly{Rational(v)};
}

Scalar::Scalar(const Rational& v) {
    if (v != 0) terms_[0] = Poly{v};
}

Scalar Scalar::t() {
    Scalar s;
    s.terms_[0] = Poly{Rational(0), Rational(1)};
    return s;
}

Scalar Scalar::exp_half(long k) {
    Scalar s;
    s.terms_[k] = Poly{Rational(1)};
    return s;
}

Scalar Scalar::term(const Rational& c, int tpow, long k) {
    Scalar s;
    if (c == 0) return s;
    Poly p(tpow + 1, Rational(0));
    p[tpow] = c;
    s.terms_[k] = std::move(p);
    return s;
}

void Scalar::prune() {
    for (auto it = terms_.begin(); it != terms_.end();) {
        poly_trim(it->second);
        if (it->second.empty())
            it = terms_.erase(it);
        else
            ++it;
    }
}

Scalar Scalar::operator-() const {
    Scalar r = *this;
    for (auto& [k, p] : r.terms_)
        for (auto& c : p) c = -c;
    return r;
}

Scalar& Scalar::operator+=(const Scalar& o) {
    for (const auto& [k, p] : o.terms_) terms_[k] = poly_add(terms_[k], p);
    prune();
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) { return *this += -o; }

Scalar operator*(const Scalar& a, const Scalar& b) {
    Scalar r;
    for (const auto& [ka, pa] : a.terms())
        for (const auto& [kb, pb] : b.terms()) {
            Scalar piece;
            piece.terms_[ka + kb] = poly_mul(pa, pb);
            r += piece;
        }
    return r;
}

Scalar& Scalar::operator*=(const Scalar& o) { return *this = *this * o; }

Scalar operator*(const Rational& c, const Scalar& s) { return Scalar(c) * s; }

bool Scalar::is_one() const {
    return terms_.size() == 1 && terms_.begin()->first == 0 &&
           terms_.begin()->second == Poly{Rational(1)};
}

bool Scalar::is_rational() const {
    if (terms_.empty()) return true;
    return terms_.size() == 1 && terms_.begin()->first == 0 &&
           terms_.begin()->second.size() == 1;
}

Rational Scalar::as_rational() const {
    if (terms_.empty()) return Rational(0);
    if (!is_rational()) throw argument_error("scalar is not a plain rational: " + str());
    return terms_.begin()->second[0];
}

Scalar Scalar::derivative() const {
    // d/dt [p(t) e^{kt/2}] = (p'(t) + (k/2) p(t)) e^{kt/2}
    Scalar r;
    for (const auto& [k, p] : terms_) {
        Poly d(p.size(), Rational(0));
        for (size_t i = 1; i < p.size(); ++i) d[i - 1] += Rational(long(i)) * p[i];
        for (size_t i = 0; i < p.size(); ++i) d[i] += ratio(k, 2) * p[i];
        poly_trim(d);
        if (!d.empty()) r.terms_[k] = poly_add(r.terms_[k], d);
    }
    r.prune();
    return r;
}

Scalar Scalar::substitute(const Rational& q) const {
    Scalar r;
    for (const auto& [k, p] : terms_) {
        Rational kq = Rational(k) * q;
        if (kq.get_den() != 1)
            throw argument_error("substitution t=" + q.get_str() +
                                 " leaves the exponent lattice (k=" + std::to_string(k) + ")");
        // Horner at t=q
        Rational v(0);
        for (size_t i = p.size(); i-- > 0;) v = v * q + p[i];
        if (v != 0) {
            Scalar piece;
            piece.terms_[kq.get_num().get_si()] = Poly{v};
            r += piece;
        }
    }
    return r;
}

double Scalar::eval(double tval) const {
    double acc = 0;
    for (const auto& [k, p] : terms_) {
        double pv = 0;
        for (size_t i = p.size(); i-- > 0;) pv = pv * tval + p[i].get_d();
        acc += pv * std::exp(0.5 * double(k) * tval);
    }
    return acc;
}

bool Scalar::invertible() const {
    return terms_.size() == 1 && terms_.begin()->second.size() == 1;
}

Scalar Scalar::inverse() const {
    if (!invertible()) throw argument_error("scalar not invertible: " + str());
    auto [k, p] = *terms_.begin();
    Scalar r;
    r.terms_[-k] = Poly{Rational(1) / p[0]};
    return r;
}

Rational Scalar::magnitude_bound_at_one() const {
    // e^{1/2} < 16488/10000, e^{-1/2} < 6066/10000; |p_k(1)| <= sum |c|
    static const Rational up(16488, 10000), down(6066, 10000);
    Rational bound(0);
    for (const auto& [k, p] : terms_) {
        Rational psum(0);
        for (const auto& c : p) psum += abs(c);
        Rational e(1);
        for (long i = 0; i < std::labs(k); ++i) e *= (k > 0 ? up : down);
        bound += psum * e;
    }
    return bound;
}

Scalar Scalar::log() const {
    if (is_one()) return Scalar();
    if (terms_.size() == 1 && terms_.begin()->second == Poly{Rational(1)})
        return term(ratio(terms_.begin()->first, 2), 1, 0);  // k t/2
    throw normalization_error("log of " + str() + " does not lie in the scalar ring");
}

std::string Scalar::str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [k, p] : terms_) {
        for (size_t i = 0; i < p.size(); ++i) {
            if (p[i] == 0) continue;
            bool neg = p[i] < 0;
            if (first)
                out += neg ? "-" : "";
            else
                out += neg ? " - " : " + ";
            first = false;
            std::string m = mono_str(p[i], i);
            if (k != 0) {
                std::string e = "exp(" + std::to_string(k) + "*t/2)";
                m = (m == "1") ? e : m + "*" + e;
            }
            out += m;
        }
    }
    return out;
}

std::string Scalar::pretty(bool t_substituted) const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [k, p] : terms_) {
        // exponential factor display
        std::string e;
        if (k != 0) {
            std::string arg;
            if (t_substituted) {
                arg = (k % 2 == 0) ? std::to_string(k / 2)
                                   : std::to_string(k) + "/2";
            } else {
                if (k % 2 == 0)
                    arg = (k / 2 == 1 ? "" : k / 2 == -1 ? "-" : std::to_string(k / 2) + "*") + std::string("t");
                else
                    arg = (k == 1 ? "" : k == -1 ? "-" : std::to_string(k) + "*") + std::string("t/2");
                if (k % 2 != 0 && k != 1 && k != -1) arg = std::to_string(k) + "*t/2";
            }
            e = "e^{" + arg + "}";
        }
        size_t nmono = 0;
        for (const auto& c : p)
            if (c != 0) ++nmono;
        if (nmono > 1 && k != 0) {
            // e^{..}*(poly)
            std::string ps;
            bool pf = true;
            for (size_t i = 0; i < p.size(); ++i) {
                if (p[i] == 0) continue;
                bool neg = p[i] < 0;
                ps += pf ? (neg ? "-" : "") : (neg ? " - " : " + ");
                pf = false;
                ps += mono_str(p[i], i);
            }
            out += first ? "" : " + ";
            out += e + "*(" + ps + ")";
            first = false;
        } else {
            for (size_t i = 0; i < p.size(); ++i) {
                if (p[i] == 0) continue;
                bool neg = p[i] < 0;
                out += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
                first = false;
                std::string m = mono_str(p[i], i);
                if (!e.empty()) m = (m == "1") ? e : m + "*" + e;
                out += m;
            }
        }
    }
    return out;
}

}  // namespace freeconv

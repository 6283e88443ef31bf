#include "freeconv/ops.hpp"

#include <algorithm>
#include <mutex>

#include "freeconv/errors.hpp"

namespace freeconv {

namespace {

// ---- letter attributes -------------------------------------------------

struct UAttrs {
    int l, r, eps;
};

UAttrs u_attrs(Deco d) {
    // plain, starinv are "right" processes; star, inv are "left" ones
    if (d == Deco::plain || d == Deco::starinv) return {0, 1, +1};
    return {1, 0, -1};
}

int gl_eps(Deco d) { return (d == Deco::plain || d == Deco::star) ? +1 : -1; }

bool starless_class(Deco d) { return d == Deco::plain || d == Deco::inv; }

int gl_delta(Deco a, Deco b) { return starless_class(a) == starless_class(b) ? 0 : 1; }

void require_single_variable(const Element& p, const char* who) {
    if (p.indices().size() > 1)
        throw scope_error(std::string(who) + " is defined for a single variable only");
}

void require_laurent(const Element& p, const char* who) {
    for (const auto& l : p.letters())
        if (l.deco == Deco::star || l.deco == Deco::starinv)
            throw scope_error(std::string(who) + " is defined on plain/inverse letters only");
}

// ---- derivation plumbing -------------------------------------------------

// Extends a word-level operator to the basis element b as a ._tr derivation.
Element derive_basis(const BasisElement& b, const std::function<Element(const Word&)>& word_op) {
    ElementBuilder out;
    {
        Element d = word_op(b.outer);
        for (const auto& [term, c] : d.terms()) {
            BasisElement nb;
            nb.outer = term.outer;
            nb.traces = term.traces;
            nb.traces.insert(nb.traces.end(), b.traces.begin(), b.traces.end());
            nb.canonicalize();
            out.add(nb, c);
        }
    }
    for (size_t m = 0; m < b.traces.size(); ++m) {
        Element d = word_op(b.traces[m]);
        for (const auto& [term, c] : d.terms()) {
            BasisElement nb;
            nb.outer = b.outer;
            for (size_t j = 0; j < b.traces.size(); ++j)
                if (j != m) nb.traces.push_back(b.traces[j]);
            // tr(term): the term's outer word becomes one more trace factor
            nb.traces.insert(nb.traces.end(), term.traces.begin(), term.traces.end());
            if (!term.outer.empty()) nb.traces.push_back(term.outer);
            nb.canonicalize();
            out.add(nb, c);
        }
    }
    return out.take();
}

Element apply_derivation(const Element& p, const std::function<Element(const Word&)>& word_op) {
    ElementBuilder out;
    for (const auto& [b, c] : p.terms()) out.add(derive_basis(b, word_op), c);
    return out.take();
}

// Enumerate increasing position tuples 1 <= k_1 < ... < k_m <= n of size
// between 1 and max_m.
void each_selection(int n, int max_m, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> sel;
    std::function<void(int)> rec = [&](int from) {
        if (!sel.empty()) fn(sel);
        if (int(sel.size()) >= max_m) return;
        for (int k = from; k <= n; ++k) {
            sel.push_back(k);
            rec(k + 1);
            sel.pop_back();
        }
    };
    rec(1);
}

Word subword(const Word& w, const std::vector<int>& positions) {
    Word r;
    for (int p : positions) r.push_back(w[p - 1]);
    return r;
}

int spec_support(const std::map<Word, Scalar>& values) {
    int m = 0;
    for (const auto& [w, v] : values)
        if (!v.is_zero()) m = std::max(m, int(w.size()));
    return m;
}

}  // namespace

// ---- delta_A / D_A --------------------------------------------------------

Element delta_A(const CumulantSpec& spec, const Element& p) {
    int cap = spec_support(spec.values);
    auto word_op = [&](const Word& w) {
        ElementBuilder out;
        int n = int(w.size());
        each_selection(n, cap, [&](const std::vector<int>& sel) {
            Scalar kappa = spec.kappa(subword(w, sel));
            if (kappa.is_zero()) return;
            BasisElement nb;
            int m = int(sel.size());
            nb.outer.assign(w.begin(), w.begin() + sel.front() - 1);
            nb.outer.insert(nb.outer.end(), w.begin() + sel.back(), w.end());
            for (int j = 0; j + 1 < m; ++j) {
                Word seg(w.begin() + sel[j], w.begin() + sel[j + 1] - 1);
                if (!seg.empty()) nb.traces.push_back(seg);
            }
            nb.canonicalize();
            out.add(nb, kappa);
        });
        return out.take();
    };
    return apply_derivation(p, word_op);
}

namespace {
Element d_A_impl(const LogCumulantSpec& spec, const Element& p, bool with_m1, bool only_m1) {
    int cap = only_m1 ? 1 : std::max(1, spec_support(spec.values));
    auto word_op = [&](const Word& w) {
        ElementBuilder out;
        int n = int(w.size());
        each_selection(n, cap, [&](const std::vector<int>& sel) {
            int m = int(sel.size());
            if (m == 1 && !with_m1) return;
            if (m > 1 && only_m1) return;
            Scalar lk = spec.lkappa(subword(w, sel));
            if (lk.is_zero()) return;
            BasisElement nb;
            // segments include their left endpoint; suffix starts AT k_m
            nb.outer.assign(w.begin(), w.begin() + sel.front() - 1);
            nb.outer.insert(nb.outer.end(), w.begin() + sel.back() - 1, w.end());
            for (int j = 0; j + 1 < m; ++j)
                nb.traces.emplace_back(w.begin() + sel[j] - 1, w.begin() + sel[j + 1] - 1);
            nb.canonicalize();
            out.add(nb, lk);
        });
        return out.take();
    };
    return apply_derivation(p, word_op);
}
}  // namespace

Element d_A(const LogCumulantSpec& spec, const Element& p) { return d_A_impl(spec, p, true, false); }
Element d_A_diagonal(const LogCumulantSpec& spec, const Element& p) {
    return d_A_impl(spec, p, true, true);
}
Element d_A_nilpotent(const LogCumulantSpec& spec, const Element& p) {
    return d_A_impl(spec, p, false, false);
}

// ---- delta_U family ---------------------------------------------------------

namespace {

// pieces shared by delta_U / delta_GL: the bracketed subword from i to j
// (0-based, inclusive) and the outer word with the bracket letters removed
struct BracketTerm {
    Word bracket;
    Word remainder;
};

BracketTerm make_bracket(const Word& w, int i, int j) {
    BracketTerm t;
    UAttrs ai = u_attrs(w[i].deco), aj = u_attrs(w[j].deco);
    if (ai.r) t.bracket.push_back(w[i]);
    t.bracket.insert(t.bracket.end(), w.begin() + i + 1, w.begin() + j);
    if (aj.l) t.bracket.push_back(w[j]);
    t.remainder.assign(w.begin(), w.begin() + i);
    if (!ai.r) t.remainder.push_back(w[i]);
    if (!aj.l) t.remainder.push_back(w[j]);
    t.remainder.insert(t.remainder.end(), w.begin() + j + 1, w.end());
    return t;
}

Element delta_u_word(const Word& w) {
    ElementBuilder out;
    int k = int(w.size());
    if (k > 0) {
        BasisElement self;
        self.outer = w;
        out.add(self, Scalar(-k));
    }
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            int eps = u_attrs(w[i].deco).eps * u_attrs(w[j].deco).eps;
            BracketTerm t = make_bracket(w, i, j);
            BasisElement nb;
            nb.outer = std::move(t.remainder);
            if (!t.bracket.empty()) nb.traces.push_back(std::move(t.bracket));
            nb.canonicalize();
            out.add(nb, Scalar(-2 * eps));
        }
    return out.take();
}

Element delta_gl_word(const Word& w) {
    ElementBuilder out;
    int k = int(w.size());
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            if (!gl_delta(w[i].deco, w[j].deco)) continue;
            int eps = gl_eps(w[i].deco) * gl_eps(w[j].deco);
            BracketTerm t = make_bracket(w, i, j);
            BasisElement nb;
            nb.outer = std::move(t.remainder);
            if (!t.bracket.empty()) nb.traces.push_back(std::move(t.bracket));
            nb.canonicalize();
            out.add(nb, Scalar(4 * eps));
        }
    return out.take();
}

// split of an E-factor into starless prefix and starred suffix
std::pair<Word, Word> split_E_factor(const Word& w, const char* who) {
    size_t cut = 0;
    while (cut < w.size() && starless_class(w[cut].deco)) ++cut;
    for (size_t i = cut; i < w.size(); ++i)
        if (starless_class(w[i].deco))
            throw scope_error(std::string(who) + ": word is not of the form P Q* "
                              "(starless letters after a starred one)");
    return {Word(w.begin(), w.begin() + cut), Word(w.begin() + cut, w.end())};
}

Word star_word(const Word& w) {
    Word r(w.rbegin(), w.rend());
    for (auto& l : r) l.deco = deco_star(l.deco);
    return r;
}

Element delta_u_plus_word(const Word& w) {
    auto [u, v] = split_E_factor(w, "delta_U^+");
    ElementBuilder out;
    for (const auto& [term, c] : delta_u_word(u).terms()) {
        BasisElement nb = term;
        nb.outer.insert(nb.outer.end(), v.begin(), v.end());
        nb.canonicalize();
        out.add(nb, c);
    }
    return out.take();
}

Element delta_u_minus_word(const Word& w) {
    auto [u, v] = split_E_factor(w, "delta_U^-");
    // w = u (q)* with q = star(v); apply delta_U to q, star it back
    Word q = star_word(v);
    ElementBuilder out;
    for (const auto& [term, c] : delta_u_word(q).terms()) {
        BasisElement nb;
        nb.outer = u;
        Word starred = star_word(term.outer);
        nb.outer.insert(nb.outer.end(), starred.begin(), starred.end());
        for (const auto& tr : term.traces) nb.traces.push_back(star_word(tr));
        nb.canonicalize();
        out.add(nb, c.conj());
    }
    return out.take();
}

}  // namespace

Element delta_U(const Element& p) {
    require_single_variable(p, "delta_U");
    return apply_derivation(p, delta_u_word);
}

Element delta_GL(const Element& p) {
    require_single_variable(p, "delta_GL");
    return apply_derivation(p, delta_gl_word);
}

bool in_E_subspace(const Element& p) {
    auto factor_ok = [](const Word& w) {
        size_t cut = 0;
        while (cut < w.size() && starless_class(w[cut].deco)) ++cut;
        for (size_t i = cut; i < w.size(); ++i)
            if (starless_class(w[i].deco)) return false;
        return true;
    };
    for (const auto& [b, c] : p.terms()) {
        if (!factor_ok(b.outer)) return false;
        for (const auto& t : b.traces)
            if (!factor_ok(t)) return false;
    }
    return true;
}

Element delta_U_plus(const Element& p) {
    require_single_variable(p, "delta_U^+");
    return apply_derivation(p, delta_u_plus_word);
}

Element delta_U_minus(const Element& p) {
    require_single_variable(p, "delta_U^-");
    return apply_derivation(p, delta_u_minus_word);
}

// ---- tilde operators -------------------------------------------------------

namespace {
Element grad_bracket_generic(const Word& u, const Word& v, bool gl) {
    ElementBuilder out;
    int k = int(u.size()), l = int(v.size());
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < l; ++j) {
            Rational coeff;
            if (gl) {
                if (!gl_delta(u[i].deco, v[j].deco)) continue;
                coeff = Rational(2 * gl_eps(u[i].deco) * gl_eps(v[j].deco));
            } else {
                coeff = Rational(-u_attrs(u[i].deco).eps * u_attrs(v[j].deco).eps);
            }
            UAttrs ai = u_attrs(u[i].deco), aj = u_attrs(v[j].deco);
            Word merged;
            merged.insert(merged.end(), u.begin(), u.begin() + i);
            if (!ai.r) merged.push_back(u[i]);
            if (!aj.l) merged.push_back(v[j]);
            merged.insert(merged.end(), v.begin() + j + 1, v.end());
            merged.insert(merged.end(), v.begin(), v.begin() + j);
            if (!aj.r) merged.push_back(v[j]);
            if (!ai.l) merged.push_back(u[i]);
            merged.insert(merged.end(), u.begin() + i + 1, u.end());
            BasisElement nb;
            nb.outer = std::move(merged);
            out.add(nb, Scalar(coeff));
        }
    return out.take();
}

Element tilde_impl(const Element& p, bool gl, const char* who) {
    require_single_variable(p, who);
    if (!gl) require_laurent(p, who);
    ElementBuilder out;
    for (const auto& [b, c] : p.terms()) {
        int n = int(b.traces.size());
        for (int m = 0; m < n; ++m) {
            Element g = grad_bracket_generic(b.outer, b.traces[m], gl);
            for (const auto& [term, gc] : g.terms()) {
                BasisElement nb;
                nb.outer = term.outer;
                for (int j = 0; j < n; ++j)
                    if (j != m) nb.traces.push_back(b.traces[j]);
                nb.canonicalize();
                out.add(nb, Scalar(2) * gc * c);
            }
        }
        for (int m = 0; m < n; ++m)
            for (int mp = 0; mp < n; ++mp) {
                if (m == mp) continue;
                Element g = grad_bracket_generic(b.traces[m], b.traces[mp], gl);
                for (const auto& [term, gc] : g.terms()) {
                    BasisElement nb;
                    nb.outer = b.outer;
                    for (int j = 0; j < n; ++j)
                        if (j != m && j != mp) nb.traces.push_back(b.traces[j]);
                    if (!term.outer.empty()) nb.traces.push_back(term.outer);
                    nb.canonicalize();
                    out.add(nb, gc * c);
                }
            }
    }
    return out.take();
}
}  // namespace

Element grad_bracket_U(const Word& p, const Word& q) { return grad_bracket_generic(p, q, false); }
Element grad_bracket_GL(const Word& p, const Word& q) { return grad_bracket_generic(p, q, true); }

Element tilde_delta_U(const Element& p) { return tilde_impl(p, false, "tilde_delta_U"); }
Element tilde_delta_GL(const Element& p) { return tilde_impl(p, true, "tilde_delta_GL"); }

// ---- exponentials -----------------------------------------------------------

Element exp_delta_A(const CumulantSpec& spec, const Element& p) {
    Element acc = p, cur = p;
    for (long k = 1; !cur.is_zero(); ++k) {
        cur = delta_A(spec, cur).scaled(Scalar(Rational(1, k)));
        acc += cur;
    }
    return acc;
}

Element cond_exp_additive(const Element& p, const CumulantSpec& spec) {
    return exp_delta_A(spec, p);
}

Element exp_d_A(const LogCumulantSpec& spec, const Element& p) {
    // diagonal factor: scale each basis term by the product of first moments
    ElementBuilder scaled;
    for (const auto& [b, c] : p.terms()) {
        Scalar f = c;
        for (const auto& l : b.outer) f *= spec.first_moment(l);
        for (const auto& t : b.traces)
            for (const auto& l : t) f *= spec.first_moment(l);
        scaled.add(b, f);
    }
    Element acc = scaled.take();
    Element cur = acc;
    for (long k = 1; !cur.is_zero(); ++k) {
        cur = d_A_nilpotent(spec, cur).scaled(Scalar(Rational(1, k)));
        acc += cur;
    }
    return acc;
}

Element cond_exp_multiplicative(const Element& p, const LogCumulantSpec& spec) {
    return exp_d_A(spec, p);
}

// ---- exact triangular exponential -------------------------------------------

namespace {

// function of u: sum over nu of poly(u) * e^{nu u}, rational nu
using ExpPoly = std::map<Rational, std::vector<Rational>>;

void expoly_add(ExpPoly& a, const Rational& nu, const std::vector<Rational>& poly,
                const Rational& factor) {
    auto& dst = a[nu];
    if (dst.size() < poly.size()) dst.resize(poly.size());
    for (size_t i = 0; i < poly.size(); ++i) dst[i] += poly[i] * factor;
}

// int_0^u s^k e^{a s} ds as an ExpPoly in u (a may be zero)
ExpPoly integral_power_exp(int k, const Rational& a) {
    ExpPoly r;
    if (a == 0) {
        std::vector<Rational> mono(k + 2);
        mono[k + 1] = Rational(1, k + 1);
        r[Rational(0)] = std::move(mono);
        return r;
    }
    // P_k with int s^k e^{as} = P_k(s) e^{as}; P_k = s^k/a - (k/a) P_{k-1}
    std::vector<Rational> P{Rational(1) / a};
    for (int i = 1; i <= k; ++i) {
        std::vector<Rational> Q(i + 1);
        for (size_t j = 0; j < P.size(); ++j) Q[j] -= Rational(i) / a * P[j];
        Q[i] += Rational(1) / a;
        P = std::move(Q);
    }
    r[a] = P;
    r[Rational(0)] = {-P[0]};
    return r;
}

}  // namespace

Element exp_triangular(const LinOp& op, const Rational& q, const Element& p) {
    // reachable closure with entries; triangularity checked on the fly
    std::vector<BasisElement> elems;
    std::map<BasisElement, int> index;
    std::vector<Rational> diag;
    // incoming[i] = list of (source j, coefficient)
    std::vector<std::vector<std::pair<int, Rational>>> incoming;
    std::vector<int> worklist;
    auto intern = [&](const BasisElement& b) {
        auto it = index.find(b);
        if (it != index.end()) return it->second;
        int id = int(elems.size());
        index.emplace(b, id);
        elems.push_back(b);
        diag.emplace_back(0);
        incoming.emplace_back();
        worklist.push_back(id);
        return id;
    };
    for (const auto& [b, c] : p.terms()) intern(b);
    for (size_t w = 0; w < worklist.size(); ++w) {
        int j = worklist[w];
        BasisElement src = elems[j];
        Element image = op(src);
        for (const auto& [target, coeff] : image.terms()) {
            if (!coeff.is_rational())
                throw argument_error("exact exponential needs rational operator entries");
            Rational value = coeff.as_rational();
            if (target == src) {
                diag[j] = value;
                continue;
            }
            if (target.trace_count() <= src.trace_count())
                throw argument_error(
                    "exact exponential requires a trace-count-triangular operator");
            int i = intern(target);
            incoming[i].emplace_back(j, value);
        }
    }
    // process rows in filtration order
    std::vector<int> order(elems.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (elems[a].trace_count() != elems[b].trace_count())
            return elems[a].trace_count() < elems[b].trace_count();
        return elems[a] < elems[b];
    });
    std::vector<ExpPoly> f(elems.size());
    for (int i : order) {
        ExpPoly& fi = f[i];
        Scalar init = p.coefficient(elems[i]);
        if (!init.is_zero()) {
            if (!init.is_rational())
                throw argument_error("exact exponential needs rational input coefficients");
            expoly_add(fi, diag[i], {init.as_rational()}, Rational(1));
        }
        for (const auto& [j, mij] : incoming[i]) {
            // contribution int_0^u e^{diag_i (u-s)} m_ij f_j(s) ds
            for (const auto& [nu, poly] : f[j])
                for (size_t k = 0; k < poly.size(); ++k) {
                    if (poly[k] == 0) continue;
                    ExpPoly piece = integral_power_exp(int(k), nu - diag[i]);
                    // multiply by e^{diag_i u}: shift every exponent
                    for (const auto& [a, pp] : piece)
                        expoly_add(fi, a + diag[i], pp, mij * poly[k]);
                }
        }
        for (auto it = fi.begin(); it != fi.end();) {
            while (!it->second.empty() && it->second.back() == 0) it->second.pop_back();
            it = it->second.empty() ? fi.erase(it) : std::next(it);
        }
    }
    // substitute u = q t
    ElementBuilder out;
    for (size_t i = 0; i < elems.size(); ++i) {
        Scalar coeff;
        for (const auto& [nu, poly] : f[i]) {
            Rational twice = nu * q * 2;
            if (twice.get_den() != 1)
                throw argument_error("exponential diagonal leaves the e^{kt/2} lattice");
            long lam = twice.get_num().get_si();
            Rational qpow(1);
            for (size_t k = 0; k < poly.size(); ++k) {
                if (poly[k] != 0) coeff += Scalar::term(poly[k] * qpow, int(k), lam);
                qpow *= q;
            }
        }
        out.add(elems[i], coeff);
    }
    return out.take();
}

Element exp_half_t_delta_U(const Element& p) {
    require_single_variable(p, "exp delta_U");
    return exp_triangular([](const BasisElement& b) { return derive_basis(b, delta_u_word); },
                          Rational(1, 2), p);
}

Element exp_quarter_t_delta_GL(const Element& p) {
    require_single_variable(p, "exp delta_GL");
    return exp_triangular([](const BasisElement& b) { return derive_basis(b, delta_gl_word); },
                          Rational(1, 4), p);
}

// ---- blocks, matrices, taylor mode -------------------------------------------

namespace {
void words_up_to(const std::vector<Letter>& alphabet, int maxlen,
                 const std::function<void(const Word&)>& fn) {
    Word cur;
    std::function<void()> rec = [&] {
        fn(cur);
        if (int(cur.size()) >= maxlen) return;
        for (const auto& l : alphabet) {
            cur.push_back(l);
            rec();
            cur.pop_back();
        }
    };
    rec();
}

std::map<std::pair<std::vector<Letter>, int>, GradedBlock> block_cache;
std::mutex block_mutex;
}  // namespace

const GradedBlock& GradedBlock::get(const std::set<Letter>& alphabet, int degree) {
    std::vector<Letter> key(alphabet.begin(), alphabet.end());
    std::lock_guard lock(block_mutex);
    auto it = block_cache.find({key, degree});
    if (it != block_cache.end()) return it->second;

    GradedBlock blk;
    blk.alphabet = key;
    blk.degree = degree;
    // trace words of each length 1..degree, sorted
    std::vector<std::vector<Word>> by_len(degree + 1);
    words_up_to(key, degree, [&](const Word& w) {
        if (!w.empty()) by_len[w.size()].push_back(w);
    });
    // assemble basis elements: outer word + non-decreasing multiset of traces
    std::function<void(BasisElement&, int, Word)> add_traces =
        [&](BasisElement& cur, int budget, Word min_word) {
            blk.basis.push_back(cur);
            for (int len = 1; len <= budget; ++len)
                for (const auto& w : by_len[len]) {
                    if (!min_word.empty() && WordLess{}(w, min_word)) continue;
                    cur.traces.push_back(w);
                    add_traces(cur, budget - len, w);
                    cur.traces.pop_back();
                }
        };
    words_up_to(key, degree, [&](const Word& outer) {
        BasisElement b;
        b.outer = outer;
        add_traces(b, degree - int(outer.size()), Word{});
    });
    std::sort(blk.basis.begin(), blk.basis.end(), [](const BasisElement& a, const BasisElement& b) {
        if (a.trace_count() != b.trace_count()) return a.trace_count() < b.trace_count();
        return a < b;
    });
    for (size_t i = 0; i < blk.basis.size(); ++i) blk.index.emplace(blk.basis[i], int(i));
    return block_cache.emplace(std::make_pair(key, degree), std::move(blk)).first->second;
}

int GradedBlock::find(const BasisElement& b) const {
    auto it = index.find(b);
    if (it == index.end()) throw argument_error("basis element outside the graded block");
    return it->second;
}

Element apply_op(OpId id, const Element& p, int N) {
    LinOp fn = op_function(id, N);
    ElementBuilder out;
    for (const auto& [b, c] : p.terms()) out.add(fn(b), c);
    return out.take();
}

LinOp op_function(OpId id, int N) {
    switch (id) {
        case OpId::delta_u:
            return [](const BasisElement& b) { return derive_basis(b, delta_u_word); };
        case OpId::delta_gl:
            return [](const BasisElement& b) { return derive_basis(b, delta_gl_word); };
        case OpId::delta_u_plus:
            return [](const BasisElement& b) { return derive_basis(b, delta_u_plus_word); };
        case OpId::delta_u_minus:
            return [](const BasisElement& b) { return derive_basis(b, delta_u_minus_word); };
        case OpId::tilde_delta_u:
            return [](const BasisElement& b) { return tilde_delta_U(Element::basis(b)); };
        case OpId::tilde_delta_gl:
            return [](const BasisElement& b) { return tilde_delta_GL(Element::basis(b)); };
        case OpId::finite_n_u:
            if (N < 1) throw argument_error("finite-N operator needs N >= 1");
            return [N](const BasisElement& b) {
                Element e = Element::basis(b);
                return derive_basis(b, delta_u_word) +
                       tilde_delta_U(e).scaled(Scalar(Rational(1, long(N) * N)));
            };
        case OpId::finite_n_gl:
            if (N < 1) throw argument_error("finite-N operator needs N >= 1");
            return [N](const BasisElement& b) {
                Element e = Element::basis(b);
                return derive_basis(b, delta_gl_word) +
                       tilde_delta_GL(e).scaled(Scalar(Rational(1, long(N) * N)));
            };
    }
    throw argument_error("unknown operator id");
}

Rational op_multiplier(OpId id) {
    switch (id) {
        case OpId::delta_gl:
        case OpId::tilde_delta_gl:
        case OpId::finite_n_gl:
            return Rational(1, 4);
        default:
            return Rational(1, 2);
    }
}

OperatorMatrix OperatorMatrix::materialize(OpId id, const GradedBlock& block, int N) {
    LinOp fn = op_function(id, N);
    OperatorMatrix M;
    M.block = &block;
    M.cols.resize(block.basis.size());
    M.triangular = true;
    for (size_t j = 0; j < block.basis.size(); ++j) {
        Element image = fn(block.basis[j]);
        for (const auto& [target, coeff] : image.terms()) {
            int i = block.find(target);
            M.cols[j].emplace_back(i, coeff.as_rational());
            if (target.trace_count() <= block.basis[j].trace_count() && i != int(j))
                M.triangular = false;
        }
    }
    return M;
}

namespace {

std::vector<Scalar> taylor_apply_vector(const OperatorMatrix& M, const Rational& mult,
                                        std::vector<Scalar> v, const Rational& tol) {
    size_t n = v.size();
    // 1-norm of mult*M
    Rational x(0);
    for (const auto& col : M.cols) {
        Rational s(0);
        for (const auto& [i, val] : col) s += abs(val);
        Rational scaled = s * Rational(abs(mult));
        if (scaled > x) x = scaled;
    }
    std::vector<Scalar> acc = v, term = std::move(v);
    for (long k = 1;; ++k) {
        std::vector<Scalar> next(n);
        for (size_t j = 0; j < n; ++j) {
            if (term[j].is_zero()) continue;
            Scalar factor = Scalar(mult / k) * term[j];
            for (const auto& [i, val] : M.cols[j]) next[i] += Scalar(val) * factor;
        }
        term = std::move(next);
        bool all_zero = true;
        Rational norm(0);
        for (const auto& s : term) {
            if (!s.is_zero()) all_zero = false;
            norm += s.magnitude_bound_at_one();
        }
        for (size_t i = 0; i < n; ++i) acc[i] += term[i];
        if (all_zero) break;
        if (Rational(k + 1) > x && norm * x / (Rational(k + 1) - x) < tol) break;
    }
    return acc;
}

Element map_star_to_inv(const Element& p) {
    ElementBuilder out;
    auto fix = [](Word w) {
        for (auto& l : w) {
            if (l.deco == Deco::star) l.deco = Deco::inv;
            else if (l.deco == Deco::starinv) l.deco = Deco::plain;
        }
        return w;
    };
    for (const auto& [b, c] : p.terms()) {
        BasisElement nb;
        nb.outer = fix(b.outer);
        for (const auto& t : b.traces) nb.traces.push_back(fix(t));
        nb.canonicalize();
        out.add(nb, c);
    }
    return out.take();
}

}  // namespace

Element exp_taylor_apply(OpId id, const Rational& mult, const Element& p, const Rational& tol,
                         int N) {
    if (p.is_zero()) return p;
    const GradedBlock& blk = GradedBlock::get(p.letters(), p.degree());
    OperatorMatrix M = OperatorMatrix::materialize(id, blk, N);
    std::vector<Scalar> v(blk.basis.size());
    for (const auto& [b, c] : p.terms()) v[blk.find(b)] = c;
    v = taylor_apply_vector(M, mult, std::move(v), tol);
    ElementBuilder out;
    for (size_t i = 0; i < v.size(); ++i) out.add(blk.basis[i], v[i]);
    return out.take();
}

ExpMatrix exp_operator(OpId id, const Rational& multiplier, const GradedBlock& block, ExpMode mode,
                       const Rational& tol, int N) {
    ExpMatrix E;
    E.block = &block;
    E.cols.resize(block.basis.size());
    if (mode == ExpMode::exact) {
        OperatorMatrix M = OperatorMatrix::materialize(id, block, N);
        if (!M.triangular)
            throw argument_error("exact mode requires a trace-count-triangular operator");
        LinOp fn = op_function(id, N);
        for (size_t j = 0; j < block.basis.size(); ++j) {
            Element col = exp_triangular(fn, multiplier, Element::basis(block.basis[j]));
            for (const auto& [b, c] : col.terms()) E.cols[j].emplace_back(block.find(b), c);
        }
        return E;
    }
    OperatorMatrix M = OperatorMatrix::materialize(id, block, N);
    for (size_t j = 0; j < block.basis.size(); ++j) {
        std::vector<Scalar> v(block.basis.size());
        v[j] = Scalar(1);
        v = taylor_apply_vector(M, multiplier, std::move(v), tol);
        for (size_t i = 0; i < v.size(); ++i)
            if (!v[i].is_zero()) E.cols[j].emplace_back(int(i), v[i]);
    }
    return E;
}

// ---- finite-N ---------------------------------------------------------------

Scalar finite_N_expectation_U(const Element& p, const Rational& t, int N, const Rational& tol) {
    Element q = map_star_to_inv(p).reduce_inverses();
    require_single_variable(q, "finite_N_expectation_U");
    Element moved = exp_taylor_apply(OpId::finite_n_u, t / 2, q.substitute_t(t), tol, N);
    return moved.at_one();
}

Scalar finite_N_expectation_GL(const Element& p, const Rational& t, int N, const Rational& tol) {
    require_single_variable(p, "finite_N_expectation_GL");
    Element moved = exp_taylor_apply(OpId::finite_n_gl, t / 4, p.substitute_t(t), tol, N);
    return moved.at_one();
}

Element hall_finite_N(const Element& p, const Rational& t, int N, const Rational& tol) {
    Element q = map_star_to_inv(p).reduce_inverses();
    require_single_variable(q, "hall_finite_N");
    return exp_taylor_apply(OpId::finite_n_u, t / 2, q.substitute_t(t), tol, N);
}

std::vector<ConvergenceRow> convergence_table(const Element& p, MatrixGroup group,
                                              const Rational& t, const std::vector<int>& Ns,
                                              const Rational& tol) {
    // limit: same taylor route with the 1/N^2 correction dropped
    Element q = group == MatrixGroup::unitary ? map_star_to_inv(p).reduce_inverses() : p;
    OpId base = group == MatrixGroup::unitary ? OpId::delta_u : OpId::delta_gl;
    OpId corrected = group == MatrixGroup::unitary ? OpId::finite_n_u : OpId::finite_n_gl;
    Rational mult = t * op_multiplier(base);
    Scalar limit = exp_taylor_apply(base, mult, q.substitute_t(t), tol).at_one();
    std::vector<ConvergenceRow> rows;
    for (int N : Ns) {
        Scalar value = exp_taylor_apply(corrected, mult, q.substitute_t(t), tol, N).at_one();
        double diff = std::abs((value - limit).eval(1.0));
        rows.push_back({N, value, limit, diff});
    }
    return rows;
}

}  // namespace freeconv

#include "freeconv/cumulants.hpp"

#include <algorithm>

#include "freeconv/errors.hpp"

namespace freeconv {

namespace {

std::string word_str(const Word& w) {
    std::string s;
    for (const auto& l : w) {
        s += "X" + std::to_string(l.index);
        switch (l.deco) {
            case Deco::plain: break;
            case Deco::star: s += "*"; break;
            case Deco::inv: s += "^-1"; break;
            case Deco::starinv: s += "*^-1"; break;
        }
        s += " ";
    }
    if (!s.empty()) s.pop_back();
    return s;
}

Word subword(const Word& w, const std::vector<int>& positions) {
    Word r;
    for (int p : positions) r.push_back(w[p - 1]);
    return r;
}

std::set<Letter> table_letters(const std::map<Word, Scalar>& values) {
    std::set<Letter> out;
    for (const auto& [w, v] : values)
        for (const auto& l : w) out.insert(l);
    return out;
}

void all_words(const std::set<Letter>& alphabet, int order,
               const std::function<void(const Word&)>& fn) {
    Word cur;
    std::function<void()> rec = [&] {
        if (!cur.empty()) fn(cur);
        if (int(cur.size()) >= order) return;
        for (const auto& l : alphabet) {
            cur.push_back(l);
            rec();
            cur.pop_back();
        }
    };
    rec();
}

}  // namespace

Scalar scalar_exp(const Scalar& s) {
    if (s.is_zero()) return Scalar(1);
    const auto& terms = s.terms();
    if (terms.size() == 1 && terms.begin()->first == 0) {
        const auto& p = terms.begin()->second;
        if (p.size() == 2 && p[0] == 0) {
            Rational twice = p[1] * 2;
            if (twice.get_den() == 1) return Scalar::exp_half(twice.get_num().get_si());
        }
    }
    throw normalization_error("exp(" + s.str() + ") does not lie in the scalar ring");
}

Scalar MomentFunctional::moment(const Word& w) const {
    if (w.empty()) return Scalar(1);
    auto it = values.find(w);
    if (it == values.end())
        throw missing_moment_error("moment undefined for word \"" + word_str(w) + "\"");
    return it->second;
}

Scalar MomentFunctional::expectation(const Element& p) const {
    Scalar acc;
    for (const auto& [b, c] : p.terms()) {
        Scalar v = c * moment(b.outer);
        for (const auto& t : b.traces) v *= moment(t);
        acc += v;
    }
    return acc;
}

Scalar CumulantSpec::kappa(const Word& w) const {
    auto it = values.find(w);
    return it == values.end() ? Scalar() : it->second;
}

Scalar CumulantSpec::kappa_partition(const Word& w, const NCPartition& pi) const {
    if (int(w.size()) != pi.n()) throw argument_error("word length must match the ground set");
    Scalar prod(1);
    for (const auto& block : pi.blocks()) {
        prod *= kappa(subword(w, block));
        if (prod.is_zero()) return prod;
    }
    return prod;
}

CumulantSpec operator+(const CumulantSpec& a, const CumulantSpec& b) {
    CumulantSpec r = a;
    r.max_order = std::max(a.max_order, b.max_order);
    for (const auto& [w, v] : b.values) {
        r.values[w] += v;
        if (r.values[w].is_zero()) r.values.erase(w);
    }
    return r;
}

Scalar LogCumulantSpec::lkappa(const Word& w) const {
    auto it = values.find(w);
    if (it != values.end()) return it->second;
    if (w.size() == 1)
        throw normalization_error("order-1 log value missing for \"" + word_str(w) + "\"");
    return Scalar();
}

Scalar LogCumulantSpec::lkappa1(const Letter& l) const { return lkappa(Word{l}); }

Scalar LogCumulantSpec::first_moment(const Letter& l) const { return scalar_exp(lkappa1(l)); }

LogCumulantSpec operator+(const LogCumulantSpec& a, const LogCumulantSpec& b) {
    LogCumulantSpec r = a;
    r.max_order = std::max(a.max_order, b.max_order);
    for (const auto& [w, v] : b.values) {
        r.values[w] += v;
        if (r.values[w].is_zero() && w.size() > 1) r.values.erase(w);
    }
    return r;
}

Scalar tau_partition(const MomentFunctional& m, const NCPartition& pi, const Word& w) {
    if (int(w.size()) != pi.n()) throw argument_error("word length must match the ground set");
    Scalar prod(1);
    for (const auto& block : pi.blocks()) prod *= m.moment(subword(w, block));
    return prod;
}

Scalar cumulant_from_moments(const MomentFunctional& m, const Word& w) {
    int n = int(w.size());
    const NCPartition one = NCPartition::full(n);
    Scalar acc;
    for (const auto& pi : nc_all(n)) acc += mobius(pi, one) * tau_partition(m, pi, w);
    return acc;
}

Scalar moment_from_cumulants(const CumulantSpec& c, const Word& w) {
    Scalar acc;
    for (const auto& pi : nc_all(int(w.size()))) acc += c.kappa_partition(w, pi);
    return acc;
}

CumulantSpec moments_to_cumulants(const MomentFunctional& m, int order) {
    CumulantSpec out;
    out.max_order = order;
    all_words(table_letters(m.values), order, [&](const Word& w) {
        Scalar k = cumulant_from_moments(m, w);
        if (!k.is_zero()) out.values[w] = k;
    });
    return out;
}

MomentFunctional cumulants_to_moments(const CumulantSpec& c, int order) {
    MomentFunctional out;
    out.max_order = order;
    all_words(table_letters(c.values), order,
              [&](const Word& w) { out.values[w] = moment_from_cumulants(c, w); });
    return out;
}

namespace {

// Largest word length carrying a (possibly) nonzero table entry; the lattice
// walks prune kernel blocks above this size.
int support_order(const std::map<Word, Scalar>& values) {
    int m = 0;
    for (const auto& [w, v] : values)
        if (!v.is_zero()) m = std::max(m, int(w.size()));
    return m;
}

}  // namespace

Scalar logcumulant_from_cumulants(const CumulantSpec& c, const Word& w) {
    int n = int(w.size());
    if (n == 1) return c.kappa(w).log();
    // normalize: kappa~(v) = kappa(v) / prod kappa_1(letter)
    bool normalized = true;
    for (const auto& l : w) {
        Scalar k1 = c.kappa(Word{l});
        if (k1.is_zero())
            throw normalization_error("log-cumulants require non-zero first moments");
        if (!k1.is_one()) normalized = false;
    }
    std::map<Letter, Scalar> inv1;
    if (!normalized)
        for (const auto& l : w) inv1.emplace(l, c.kappa(Word{l}).inverse());
    auto kappa_norm = [&](const Word& v) {
        Scalar k = c.kappa(v);
        if (normalized || k.is_zero()) return k;
        for (const auto& l : v) k *= inv1.at(l);
        return k;
    };
    auto kernel_value = [&](const NCPartition& sigma, const NCPartition& pi) {
        Scalar prod(1);
        NCPartition kernel = kreweras(sigma, pi);
        for (const auto& block : kernel.blocks()) {
            prod *= kappa_norm(subword(w, block));
            if (prod.is_zero()) break;
        }
        return prod;
    };
    // level DP over strict chains 0_n -> 1_n
    const NCPartition zero = NCPartition::discrete(n), one = NCPartition::full(n);
    std::map<NCPartition, Scalar> level;
    level[zero] = Scalar(1);
    Scalar acc;
    for (int len = 1; len < n && !level.empty(); ++len) {
        std::map<NCPartition, Scalar> next;
        for (const auto& [sigma, val] : level)
            for (const auto& pi : coarsenings(sigma)) {
                if (pi == sigma) continue;
                Scalar kv = kernel_value(sigma, pi);
                if (kv.is_zero()) continue;
                next[pi] += val * kv;
            }
        for (auto it = next.begin(); it != next.end();)
            it = it->second.is_zero() ? next.erase(it) : std::next(it);
        auto hit = next.find(one);
        if (hit != next.end()) {
            Rational coeff(len % 2 == 0 ? -1 : 1, len);  // (-1)^{1+len} / len
            acc += coeff * hit->second;
        }
        level = std::move(next);
    }
    return acc;
}

LogCumulantSpec logcumulants_from_cumulants(const CumulantSpec& c, int order) {
    LogCumulantSpec out;
    out.max_order = order;
    all_words(table_letters(c.values), order, [&](const Word& w) {
        Scalar v = logcumulant_from_cumulants(c, w);
        if (!v.is_zero() || w.size() == 1) out.values[w] = v;
    });
    return out;
}

namespace {

// Simple-chain level DP from 0_n; reports sum_l g_l(pi)/l! per endpoint.
std::map<NCPartition, Scalar> simple_chain_sums(const LogCumulantSpec& l, const Word& w) {
    int n = int(w.size());
    int cap = std::max(2, support_order(l.values));
    const NCPartition zero = NCPartition::discrete(n);
    std::map<NCPartition, Scalar> level, total;
    level[zero] = Scalar(1);
    total[zero] = Scalar(1);
    Rational factorial(1);
    for (int len = 1; len < n && !level.empty(); ++len) {
        factorial *= len;
        std::map<NCPartition, Scalar> next;
        for (const auto& [sigma, val] : level)
            for (const auto& step : simple_successors(sigma, cap)) {
                Scalar lv = l.lkappa(subword(w, step.kernel_block));
                if (lv.is_zero()) continue;
                next[step.pi] += val * lv;
            }
        for (auto it = next.begin(); it != next.end();)
            it = it->second.is_zero() ? next.erase(it) : std::next(it);
        Rational inv_fact = Rational(1) / factorial;
        for (const auto& [pi, val] : next) total[pi] += inv_fact * val;
        level = std::move(next);
    }
    return total;
}

Scalar first_moment_product(const LogCumulantSpec& l, const Word& w) {
    Scalar prod(1);
    for (const auto& letter : w) prod *= l.first_moment(letter);
    return prod;
}

}  // namespace

Scalar kappa_pi_from_logcumulants(const LogCumulantSpec& l, const Word& w, const NCPartition& pi) {
    auto sums = simple_chain_sums(l, w);
    auto it = sums.find(pi);
    Scalar chain_part = it == sums.end() ? Scalar() : it->second;
    return first_moment_product(l, w) * chain_part;
}

CumulantSpec cumulants_from_logcumulants(const LogCumulantSpec& l, int order) {
    CumulantSpec out;
    out.max_order = order;
    all_words(table_letters(l.values), order, [&](const Word& w) {
        Scalar v = kappa_pi_from_logcumulants(l, w, NCPartition::full(int(w.size())));
        if (!v.is_zero()) out.values[w] = v;
    });
    return out;
}

Scalar moment_from_logcumulants(const LogCumulantSpec& l, const Word& w) {
    auto sums = simple_chain_sums(l, w);
    Scalar acc;
    for (const auto& [pi, val] : sums) acc += val;
    return first_moment_product(l, w) * acc;
}

MomentFunctional moments_from_logcumulants(const LogCumulantSpec& l, int order) {
    MomentFunctional out;
    out.max_order = order;
    all_words(table_letters(l.values), order,
              [&](const Word& w) { out.values[w] = moment_from_logcumulants(l, w); });
    return out;
}

Scalar unitary_bm_moment(int n) {
    if (n < 1) throw argument_error("unitary moment order must be >= 1");
    Scalar acc;
    for (int k = 0; k <= n - 1; ++k) {
        mpz_class binom;
        mpz_bin_uiui(binom.get_mpz_t(), n, k + 1);
        mpz_class fact;
        mpz_fac_ui(fact.get_mpz_t(), k);
        // binom(n,k+1) * n^{k-1} / k!, times (-1)^k
        Rational c = Rational(binom) / Rational(fact);
        if (k == 0)
            c /= n;
        else
            for (int i = 0; i < k - 1; ++i) c *= n;
        if (k % 2) c = -c;
        acc += Scalar::term(c, k, -n);
    }
    return acc;
}

CumulantSpec semicircular_spec(const Scalar& variance, int index) {
    CumulantSpec c;
    c.max_order = 2;
    for (Deco a : {Deco::plain, Deco::star})
        for (Deco b : {Deco::plain, Deco::star})
            c.values[Word{Letter{index, a}, Letter{index, b}}] = variance;
    return c;
}

CumulantSpec circular_pair_spec(int index) {
    CumulantSpec c;
    c.max_order = 2;
    c.values[Word{Letter{index, Deco::plain}, Letter{index, Deco::star}}] = Scalar(1);
    c.values[Word{Letter{index, Deco::star}, Letter{index, Deco::plain}}] = Scalar(1);
    return c;
}

LogCumulantSpec unitary_bm_logspec(int index) {
    LogCumulantSpec l;
    l.max_order = 2;
    Letter x{index, Deco::plain};
    l.values[Word{x}] = Scalar::term(Rational(-1, 2), 1, 0);  // -t/2
    l.values[Word{x, x}] = Scalar::term(Rational(-1), 1, 0);  // -t
    return l;
}

Element factorize(const Element& p, const std::function<Scalar(const Word&)>& mu) {
    ElementBuilder out;
    for (const auto& [b, c] : p.terms()) {
        Scalar coeff = c;
        for (const auto& t : b.traces) {
            coeff *= mu(t);
            if (coeff.is_zero()) break;
        }
        if (coeff.is_zero()) continue;
        BasisElement word_only;
        word_only.outer = b.outer;
        out.add(word_only, coeff);
    }
    return out.take();
}

Element factorize(const Element& p, const MomentFunctional& mu) {
    return factorize(p, [&](const Word& w) { return mu.moment(w); });
}

namespace {

using Series = std::vector<Scalar>;  // coefficients of z^0 .. z^order

Series series_mul(const Series& a, const Series& b, int order) {
    Series r(order + 1);
    for (int i = 0; i <= order; ++i)
        for (int j = 0; i + j <= order && j <= order; ++j)
            if (i < int(a.size()) && j < int(b.size())) r[i + j] += a[i] * b[j];
    return r;
}

}  // namespace

RSTransform r_and_s_transform(const CumulantSpec& c, int order, int index) {
    Letter x{index, Deco::plain};
    if (!c.kappa(Word{x}).is_one())
        throw normalization_error("r_and_s_transform requires kappa_1 = 1");
    RSTransform out;
    out.r.assign(order + 1, Scalar());
    for (int n = 1; n <= order; ++n) out.r[n] = c.kappa(Word(n, x));
    // inverse under composition: I(z) = z S(z) with R(I(z)) = z
    Series inv(order + 1);
    inv[1] = Scalar(1);  // kappa_1 = 1
    for (int n = 2; n <= order; ++n) {
        // coefficient of z^n in sum_m kappa_m I(z)^m must vanish
        Series ipow = inv;  // I^1
        Scalar acc;
        for (int m = 2; m <= n; ++m) {
            ipow = series_mul(ipow, inv, order);
            acc += out.r[m] * ipow[n];
        }
        inv[n] = -acc;
    }
    out.s.assign(order + 1, Scalar());
    for (int n = 0; n < order; ++n) out.s[n] = inv[n + 1];  // S = I / z
    // log S = -sum_k (1 - S)^k / k
    Series one_minus_s(order + 1);
    for (int n = 0; n <= order; ++n) one_minus_s[n] = (n == 0 ? Scalar(1) : Scalar()) - out.s[n];
    Series logs(order + 1), pw(order + 1);
    pw[0] = Scalar(1);
    for (int k = 1; k <= order; ++k) {
        pw = series_mul(pw, one_minus_s, order);
        Rational inv_k = Rational(-1, k);
        for (int n = 0; n <= order; ++n) logs[n] += inv_k * pw[n];
    }
    out.minus_z_log_s.assign(order + 1, Scalar());
    for (int n = 1; n <= order; ++n) out.minus_z_log_s[n] = -logs[n - 1];
    return out;
}

}  // namespace freeconv

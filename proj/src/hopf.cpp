#include "freeconv/hopf.hpp"

#include "freeconv/errors.hpp"

namespace freeconv {
namespace hopf {

namespace {
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

void all_words(const std::set<Letter>& alphabet, int lo, int hi,
               const std::function<void(const Word&)>& fn) {
    Word cur;
    std::function<void()> rec = [&] {
        if (int(cur.size()) >= lo) fn(cur);
        if (int(cur.size()) >= hi) return;
        for (const auto& l : alphabet) {
            cur.push_back(l);
            rec();
            cur.pop_back();
        }
    };
    rec();
}
}  // namespace

Scalar Functional::on_generator(const Word& w) const {
    if (w.size() <= 1) return Scalar(w.size() == 1 && mode == Mode::character ? 1 : 0);
    auto it = gen.find(w);
    return it == gen.end() ? Scalar() : it->second;
}

Scalar Functional::on_monomial(const Word& w, const NCPartition& pi) const {
    if (int(w.size()) != pi.n()) throw argument_error("word length must match the ground set");
    if (mode == Mode::character) {
        Scalar prod(1);
        for (const auto& block : pi.blocks()) {
            if (block.size() == 1) continue;  // Y_w = 1 for |w| = 1
            prod *= on_generator(subword(w, block));
            if (prod.is_zero()) break;
        }
        return prod;
    }
    // infinitesimal: products of >= 2 non-trivial generators vanish, as does 1
    const std::vector<int>* fat = nullptr;
    for (const auto& block : pi.blocks()) {
        if (block.size() < 2) continue;
        if (fat) return Scalar();
        fat = &block;
    }
    if (!fat) return Scalar();
    return on_generator(subword(w, *fat));
}

Functional counit() { return Functional{Mode::character, {}}; }

Functional character_from_cumulants(const CumulantSpec& c) {
    Functional f{Mode::character, {}};
    for (const auto& [w, v] : c.values)
        if (w.size() >= 2) f.gen[w] = v;
    return f;
}

Functional character_from_moments(const MomentFunctional& m) {
    Functional f{Mode::character, {}};
    for (const auto& [w, v] : m.values)
        if (w.size() >= 2) f.gen[w] = v;
    return f;
}

Scalar convolve_value(const Functional& xi, const Functional& eta, const Word& w,
                      const NCPartition& pi) {
    Scalar acc;
    for (const auto& sigma : nc_all(pi.n())) {
        if (!sigma.refines(pi)) continue;
        Scalar a = xi.on_monomial(w, sigma);
        if (a.is_zero()) continue;
        acc += a * eta.on_monomial(w, kreweras(sigma, pi));
    }
    return acc;
}

Scalar convolve_value(const Functional& xi, const Functional& eta, const Word& w) {
    return convolve_value(xi, eta, w, NCPartition::full(int(w.size())));
}

namespace {
Scalar convolution_power_memo(const MonomialFn& xi, int l, const Word& w, const NCPartition& pi,
                              std::map<std::pair<int, NCPartition>, Scalar>& memo) {
    if (l == 0)  // unit of convolution: the counit
        return Scalar(pi == NCPartition::discrete(pi.n()) ? 1 : 0);
    auto key = std::make_pair(l, pi);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    Scalar acc;
    for (const auto& sigma : nc_all(pi.n())) {
        if (!sigma.refines(pi)) continue;
        Scalar a = xi(w, sigma);
        if (a.is_zero()) continue;
        acc += a * convolution_power_memo(xi, l - 1, w, kreweras(sigma, pi), memo);
    }
    memo.emplace(key, acc);
    return acc;
}
}  // namespace

Scalar convolution_power(const MonomialFn& xi, int l, const Word& w, const NCPartition& pi) {
    std::map<std::pair<int, NCPartition>, Scalar> memo;
    return convolution_power_memo(xi, l, w, pi, memo);
}

Functional log_star(const Functional& eta, int order) {
    if (!eta.unit().is_one()) throw argument_error("log_star requires a character (unit 1)");
    Functional out{Mode::infinitesimal, {}};
    MonomialFn defect = [&eta](const Word& w, const NCPartition& pi) {
        // (eps - eta)(Y_{w;pi})
        Scalar e(pi == NCPartition::discrete(pi.n()) ? 1 : 0);
        return e - eta.on_monomial(w, pi);
    };
    all_words(table_letters(eta.gen), 2, order, [&](const Word& w) {
        int n = int(w.size());
        const NCPartition one = NCPartition::full(n);
        std::map<std::pair<int, NCPartition>, Scalar> memo;
        Scalar acc;
        for (int l = 1; l <= n; ++l) {
            Scalar p = convolution_power_memo(defect, l, w, one, memo);
            acc -= Rational(1, l) * p;
        }
        if (!acc.is_zero()) out.gen[w] = acc;
    });
    return out;
}

Functional exp_star(const Functional& xi, int order) {
    if (!xi.unit().is_zero()) throw argument_error("exp_star requires an infinitesimal (unit 0)");
    Functional out{Mode::character, {}};
    MonomialFn val = [&xi](const Word& w, const NCPartition& pi) { return xi.on_monomial(w, pi); };
    all_words(table_letters(xi.gen), 2, order, [&](const Word& w) {
        int n = int(w.size());
        const NCPartition one = NCPartition::full(n);
        std::map<std::pair<int, NCPartition>, Scalar> memo;
        Scalar acc;
        Rational fact(1);
        for (int l = 1; l <= n; ++l) {
            fact *= l;
            acc += Rational(1) / fact * convolution_power_memo(val, l, w, one, memo);
        }
        if (!acc.is_zero()) out.gen[w] = acc;
    });
    return out;
}

}  // namespace hopf
}  // namespace freeconv

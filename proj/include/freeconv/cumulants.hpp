#pragma once

#include <functional>
#include <map>

#include "freeconv/algebra.hpp"
#include "freeconv/ncpart.hpp"

namespace freeconv {

// e^s for the s that stay inside the ring: 0 and (k/2) t with k integer.
Scalar scalar_exp(const Scalar& s);

// Distribution table: word -> tau(word), with tau(empty) = 1.  A missing
// word is an error (moments must be supplied up to the order in use).
struct MomentFunctional {
    std::map<Word, Scalar> values;
    int max_order = 0;

    Scalar moment(const Word& w) const;
    // Multiplicative extension to the canonical basis and by linearity the
    // formal expectation of an Element: tau(p(A)).
    Scalar expectation(const Element& p) const;
};

struct CumulantSpec {
    std::map<Word, Scalar> values;  // missing word = vanishing cumulant
    int max_order = 0;

    Scalar kappa(const Word& w) const;
    // kappa[pi]: blockwise product over the partition blocks.
    Scalar kappa_partition(const Word& w, const NCPartition& pi) const;

    friend CumulantSpec operator+(const CumulantSpec& a, const CumulantSpec& b);
};

struct LogCumulantSpec {
    std::map<Word, Scalar> values;  // order-1 entries are supplied, not computed
    int max_order = 0;

    Scalar lkappa(const Word& w) const;
    Scalar lkappa1(const Letter& l) const;       // throws when absent
    Scalar first_moment(const Letter& l) const;  // e^{Lkappa_1}, must stay in the ring

    friend LogCumulantSpec operator+(const LogCumulantSpec& a, const LogCumulantSpec& b);
};

// tau[pi](word) = prod over blocks of the moment of the sub-word.
Scalar tau_partition(const MomentFunctional& m, const NCPartition& pi, const Word& w);

// Moebius inversion over NC(n), both directions.  The alphabet is taken from
// the argument's tables; all words up to `order` are converted.
CumulantSpec moments_to_cumulants(const MomentFunctional& m, int order);
MomentFunctional cumulants_to_moments(const CumulantSpec& c, int order);

Scalar cumulant_from_moments(const MomentFunctional& m, const Word& w);
Scalar moment_from_cumulants(const CumulantSpec& c, const Word& w);

// Chain sum over (strict) chains 0_n -> 1_n; requires kappa_1 = 1 after
// normalization (kappa_1 = 0 is rejected).
LogCumulantSpec logcumulants_from_cumulants(const CumulantSpec& c, int order);
Scalar logcumulant_from_cumulants(const CumulantSpec& c, const Word& w);

// Simple-chain sums (computed by a level DP over the lattice, which is the
// same sum with zero steps pruned).
Scalar kappa_pi_from_logcumulants(const LogCumulantSpec& l, const Word& w, const NCPartition& pi);
CumulantSpec cumulants_from_logcumulants(const LogCumulantSpec& l, int order);
Scalar moment_from_logcumulants(const LogCumulantSpec& l, const Word& w);
MomentFunctional moments_from_logcumulants(const LogCumulantSpec& l, int order);

// Closed form e^{-nt/2} sum_k ((-t)^k / k!) binom(n, k+1) n^{k-1}.
Scalar unitary_bm_moment(int n);

// Standard laws, all on the single index `index`.
CumulantSpec semicircular_spec(const Scalar& variance, int index = 1);
CumulantSpec circular_pair_spec(int index = 1);
LogCumulantSpec unitary_bm_logspec(int index = 1);

// Substitution of a distribution for tr: every trace factor tr(M) becomes
// the scalar mu(M); the result is trace-free.
Element factorize(const Element& p, const std::function<Scalar(const Word&)>& mu);
Element factorize(const Element& p, const MomentFunctional& mu);

// Formal one-variable series link R / S / -z log S (kappa_1 must equal 1).
struct RSTransform {
    std::vector<Scalar> r;            // R(z) = sum kappa_n z^n, r[0] = 0
    std::vector<Scalar> s;            // S(z), s[0] = 1
    std::vector<Scalar> minus_z_log_s;  // should match sum_{n>=2} Lkappa_n z^n
};
RSTransform r_and_s_transform(const CumulantSpec& c, int order, int index = 1);

}  // namespace freeconv

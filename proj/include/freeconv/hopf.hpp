#pragma once

#include <map>

#include "freeconv/cumulants.hpp"

namespace freeconv {
namespace hopf {

// Linear functionals on the polynomial bialgebra generated by Y_w, |w| >= 2,
// evaluated only on monomials Y_{w;pi} (the full algebra is never
// materialized; products over blocks are all the results need).
enum class Mode { character, infinitesimal };

struct Functional {
    Mode mode = Mode::character;
    std::map<Word, Scalar> gen;  // values on generators Y_w, |w| >= 2; absent = 0

    Scalar unit() const { return Scalar(mode == Mode::character ? 1 : 0); }
    Scalar on_generator(const Word& w) const;
    // Value on Y_{w;pi}: product over blocks for a character; for an
    // infinitesimal character the value vanishes unless exactly one block is
    // non-trivial.
    Scalar on_monomial(const Word& w, const NCPartition& pi) const;
};

Functional counit();  // epsilon

// Character built from a cumulant table (chi_A) or a moment table (eta_B).
Functional character_from_cumulants(const CumulantSpec& c);
Functional character_from_moments(const MomentFunctional& m);

// (xi * eta)(Y_{w;pi}) = sum_{sigma <= pi} xi(Y_{w;sigma}) eta(Y_{w;K_pi(sigma)}).
Scalar convolve_value(const Functional& xi, const Functional& eta, const Word& w);
Scalar convolve_value(const Functional& xi, const Functional& eta, const Word& w,
                      const NCPartition& pi);

// Convolution powers of (xi - its unit defect) handled by the callers; this
// is the raw power of a monomial evaluator with xi^{*0} = epsilon.
using MonomialFn = std::function<Scalar(const Word&, const NCPartition&)>;
Scalar convolution_power(const MonomialFn& xi, int l, const Word& w, const NCPartition& pi);

// log_* eta = -sum (1/l) (eps - eta)^{*l}; exact on words of length <= order
// by local nilpotence.  eta must be a character (unit value 1).
Functional log_star(const Functional& eta, int order);

// exp_* xi = sum (1/l!) xi^{*l}; xi must be infinitesimal (unit value 0).
Functional exp_star(const Functional& xi, int order);

}  // namespace hopf
}  // namespace freeconv

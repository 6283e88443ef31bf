#pragma once

#include <functional>
#include <optional>

#include "freeconv/cumulants.hpp"

namespace freeconv {

enum class MatrixGroup { unitary, linear };

// ---- derivations on (C{X_i}, ._tr) ----------------------------------------

// Additive transition operator: selected letters removed, cumulant weight,
// segments strictly between selections become trace factors.  Strictly
// decreases degree.
Element delta_A(const CumulantSpec& spec, const Element& p);

// Multiplicative transition operator: log-cumulant weight, segments include
// their left endpoint, no letters removed.  Requires order-1 log values.
Element d_A(const LogCumulantSpec& spec, const Element& p);
Element d_A_diagonal(const LogCumulantSpec& spec, const Element& p);   // m = 1 part
Element d_A_nilpotent(const LogCumulantSpec& spec, const Element& p);  // m >= 2 part

// Generator of the free unitary heat semigroup on C{X,X*,X^-1,X*^-1}
// (single variable).  (t/2) delta_U coincides with D_{U_t} on C{X}.
Element delta_U(const Element& p);

// Generator of the free multiplicative circular semigroup; vanishes on C{X}.
Element delta_GL(const Element& p);

// Auxiliary derivations on the subspace E spanned by P Q* products of
// Laurent monomials; they act by delta_U on the starless (resp. starred)
// factor only.  Inputs outside E are rejected.
Element delta_U_plus(const Element& p);
Element delta_U_minus(const Element& p);
bool in_E_subspace(const Element& p);

// 1/N^2-correction operators (gradient brackets between trace factors).
Element tilde_delta_U(const Element& p);
Element tilde_delta_GL(const Element& p);
Element grad_bracket_U(const Word& p, const Word& q);
Element grad_bracket_GL(const Word& p, const Word& q);

// ---- exponentials ----------------------------------------------------------

// e^{Delta_A} p: finite sum by nilpotence (degree strictly decreases).
Element exp_delta_A(const CumulantSpec& spec, const Element& p);
// tau(P(A+B)|B) as an Element in the B-indeterminates.
Element cond_exp_additive(const Element& p, const CumulantSpec& spec);

// e^{D_A} p via the commuting split e^{D_A} = e^{D_{A/tau}} e^{D_{tau}};
// the diagonal factor scales each basis term by the product of first
// moments, the nilpotent factor is a finite sum.
Element exp_d_A(const LogCumulantSpec& spec, const Element& p);
Element cond_exp_multiplicative(const Element& p, const LogCumulantSpec& spec);

using LinOp = std::function<Element(const BasisElement&)>;

// Exact e^{q t Op} p for operators that are triangular in the trace-count
// filtration with rational diagonal (every trace-count-preserving entry must
// be diagonal; off-diagonal entries must be rational).  The diagonal d must
// satisfy 2 d q integral so entries stay on the e^{kt/2} lattice.
Element exp_triangular(const LinOp& op, const Rational& q, const Element& p);

// Convenience: exact e^{(t/2) delta_U} p and e^{(t/4) delta_GL} p.
Element exp_half_t_delta_U(const Element& p);
Element exp_quarter_t_delta_GL(const Element& p);

// ---- graded blocks and matrices --------------------------------------------

struct GradedBlock {
    std::vector<Letter> alphabet;
    int degree = 0;
    std::vector<BasisElement> basis;          // sorted by trace count (filtration)
    std::map<BasisElement, int> index;

    static const GradedBlock& get(const std::set<Letter>& alphabet, int degree);  // cached
    int find(const BasisElement& b) const;
};

enum class OpId {
    delta_u,
    delta_gl,
    delta_u_plus,
    delta_u_minus,
    tilde_delta_u,
    tilde_delta_gl,
    finite_n_u,    // delta_U + N^-2 tilde_delta_U
    finite_n_gl,   // delta_GL + N^-2 tilde_delta_GL
};

Element apply_op(OpId id, const Element& p, int N = 0);
LinOp op_function(OpId id, int N = 0);
// Natural time multiplier coefficient: e^{q t Op} with q = 1/2 (U), 1/4 (GL).
Rational op_multiplier(OpId id);

struct OperatorMatrix {
    const GradedBlock* block = nullptr;
    // column-major sparse entries: cols[j] = {(i, value)} meaning Op b_j has
    // coefficient value on b_i
    std::vector<std::vector<std::pair<int, Rational>>> cols;
    bool triangular = false;  // every trace-count-preserving entry is diagonal

    static OperatorMatrix materialize(OpId id, const GradedBlock& block, int N = 0);
};

enum class ExpMode { exact, taylor };

// Matrix of e^{multiplier * Op} on the block.  Exact mode needs the
// triangular flag and returns symbolic entries with multiplier q*t; taylor
// mode sums the series at a rational multiplier until the 1-norm tail bound
// drops below tol.
struct ExpMatrix {
    const GradedBlock* block = nullptr;
    std::vector<std::vector<std::pair<int, Scalar>>> cols;
};
ExpMatrix exp_operator(OpId id, const Rational& multiplier, const GradedBlock& block,
                       ExpMode mode, const Rational& tol = Rational(1, 1000000), int N = 0);

// e^{mult * Op} p with rational mult, exact rational/Scalar arithmetic,
// conservative 1-norm tail bound below tol.
Element exp_taylor_apply(OpId id, const Rational& mult, const Element& p, const Rational& tol,
                         int N = 0);

// ---- finite-N expectation formulas ------------------------------------------

inline const Rational kDefaultTol = Rational(1, mpz_class("1000000000000000000000000000000"));

// E[P(U_t^{(N)})](1) and E[P(G_t^{(N)})](1) at rational t via taylor mode.
// The unitary route substitutes X* = X^-1 first (valid on U(N)).
Scalar finite_N_expectation_U(const Element& p, const Rational& t, int N,
                              const Rational& tol = kDefaultTol);
Scalar finite_N_expectation_GL(const Element& p, const Rational& t, int N,
                               const Rational& tol = kDefaultTol);
// The Element e^{(t/2)(delta_U + N^-2 tilde_delta_U)} p before evaluation.
Element hall_finite_N(const Element& p, const Rational& t, int N,
                      const Rational& tol = kDefaultTol);

struct ConvergenceRow {
    int N;
    Scalar value;
    Scalar limit;
    double abs_diff;
};
std::vector<ConvergenceRow> convergence_table(const Element& p, MatrixGroup group,
                                              const Rational& t, const std::vector<int>& Ns,
                                              const Rational& tol = kDefaultTol);

}  // namespace freeconv

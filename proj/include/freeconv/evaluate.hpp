#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>

#include "freeconv/algebra.hpp"

namespace freeconv {

using CMatrix = Eigen::MatrixXcd;

// The unique algebra homomorphism with X_i -> assignment[i], decorations ->
// adjoint/inverse, tr -> normalized trace, Scalar coefficients evaluated at
// the numeric t.  Singular matrices under an inverse decoration are rejected.
CMatrix evaluate_element(const Element& p, const std::map<int, CMatrix>& assignment,
                         double tval = 0.0);

// Normalized trace of the evaluation (the scalar value of tr-wrapped p).
std::complex<double> evaluate_scalar(const Element& p, const std::map<int, CMatrix>& assignment,
                                     double tval = 0.0);

}  // namespace freeconv

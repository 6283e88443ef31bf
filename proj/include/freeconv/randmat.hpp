#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "freeconv/evaluate.hpp"
#include "freeconv/ops.hpp"

namespace freeconv {

struct MCConfig {
    int N = 4;
    double t = 1.0;
    int steps = 200;
    long long samples = 10000;
    std::uint64_t seed = 1;
    MatrixGroup group = MatrixGroup::unitary;
};

struct MomentEstimate {
    std::complex<double> mean;
    double stderr_ = 0.0;
    long long samples = 0;
};

// Counter-based Gaussian stream: sample i draws from the stream seed^i, so
// estimates are independent of thread count and iteration order.
class GaussianStream {
  public:
    GaussianStream(std::uint64_t seed, std::uint64_t stream);
    double next();

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
    std::uint64_t next_u64();
};

// Matrix exponential (scaling and squaring + Taylor) and the polar-factor
// projection used to re-unitarize.
CMatrix expm(const CMatrix& A);
CMatrix polar_unitary(const CMatrix& A);

// One Brownian-motion sample at time t: geodesic Euler with Gaussian Lie
// algebra increments over the paper's orthonormal bases.  The unitary chain
// is re-unitarized each step; the linear chain is left unprojected.
CMatrix sample_unitary_bm(const MCConfig& cfg, long long sample_index);
CMatrix sample_linear_bm(const MCConfig& cfg, long long sample_index);

// Monte Carlo mean of the scalar value tr(p) over the sample matrices.
MomentEstimate estimate(const Element& p, const MCConfig& cfg, int threads = 1);

// Same stream of matrices, several observables at once.
std::vector<MomentEstimate> estimate_panel(const std::vector<Element>& ps, const MCConfig& cfg,
                                           int threads = 1);

// Max relative entry error of the central second difference of P against
// ((delta_U + N^-2 tilde_delta_U) P)(U) at the point U.
double laplacian_fd_check(const Element& p, int N, const CMatrix& U, double h);

// The paper's orthonormal basis of u(N) for <X,Y> = N Tr(X*Y).
std::vector<CMatrix> unitary_basis(int N);
// Orthonormal basis of gl_N(C) for <X,Y> = N Re Tr(X*Y): (1/sqrt N) E_ab and
// (i/sqrt N) E_ab.
std::vector<CMatrix> linear_basis(int N);

}  // namespace freeconv

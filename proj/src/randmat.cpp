#include "freeconv/randmat.hpp"

#include <cmath>
#include <thread>

#include "freeconv/errors.hpp"

namespace freeconv {

namespace {
std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}
}  // namespace

GaussianStream::GaussianStream(std::uint64_t seed, std::uint64_t stream) {
    state_ = seed ^ (0x6a09e667f3bcc909ull * (stream + 1));
    // burn-in decorrelates nearby streams
    for (int i = 0; i < 4; ++i) splitmix64(state_);
}

std::uint64_t GaussianStream::next_u64() { return splitmix64(state_); }

double GaussianStream::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller on (0,1] uniforms
    double u1 = (double(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = double(next_u64() >> 11) * 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

CMatrix expm(const CMatrix& A) {
    int squarings = 0;
    double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
    CMatrix B = A;
    while (norm > 0.5) {
        B /= 2.0;
        norm /= 2.0;
        ++squarings;
    }
    int n = int(A.rows());
    CMatrix result = CMatrix::Identity(n, n), term = CMatrix::Identity(n, n);
    for (int k = 1; k <= 14; ++k) {
        term = term * B / double(k);
        result += term;
        if (term.cwiseAbs().maxCoeff() < 1e-17) break;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

CMatrix polar_unitary(const CMatrix& A) {
    // Newton iteration X <- (X + X^-*) / 2 converges to the polar factor
    CMatrix X = A;
    for (int it = 0; it < 20; ++it) {
        CMatrix next = 0.5 * (X + X.adjoint().inverse());
        double delta = (next - X).cwiseAbs().maxCoeff();
        X = next;
        if (delta < 1e-14) break;
    }
    return X;
}

std::vector<CMatrix> unitary_basis(int N) {
    std::vector<CMatrix> basis;
    const std::complex<double> I(0, 1);
    double s = 1.0 / std::sqrt(double(N));
    for (int a = 0; a < N; ++a) {
        CMatrix M = CMatrix::Zero(N, N);
        M(a, a) = I * s;
        basis.push_back(M);
    }
    double s2 = 1.0 / std::sqrt(2.0 * N);
    for (int a = 0; a < N; ++a)
        for (int b = a + 1; b < N; ++b) {
            CMatrix M = CMatrix::Zero(N, N);
            M(a, b) = s2;
            M(b, a) = -s2;
            basis.push_back(M);
            CMatrix M2 = CMatrix::Zero(N, N);
            M2(a, b) = I * s2;
            M2(b, a) = I * s2;
            basis.push_back(M2);
        }
    return basis;
}

std::vector<CMatrix> linear_basis(int N) {
    std::vector<CMatrix> basis;
    const std::complex<double> I(0, 1);
    double s = 1.0 / std::sqrt(double(N));
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            CMatrix M = CMatrix::Zero(N, N);
            M(a, b) = s;
            basis.push_back(M);
            CMatrix M2 = CMatrix::Zero(N, N);
            M2(a, b) = I * s;
            basis.push_back(M2);
        }
    return basis;
}

namespace {
CMatrix sample_bm(const MCConfig& cfg, long long sample_index, bool unitary) {
    const auto basis = unitary ? unitary_basis(cfg.N) : linear_basis(cfg.N);
    GaussianStream g(cfg.seed, std::uint64_t(sample_index));
    double h = cfg.t / cfg.steps;
    // unitary generator (1/2) Delta_U(N): step exp(sqrt(h) Xi);
    // linear generator (1/4) Delta_GL: step exp(sqrt(h/2) Xi)
    double scale = std::sqrt(unitary ? h : h / 2.0);
    CMatrix U = CMatrix::Identity(cfg.N, cfg.N);
    for (int s = 0; s < cfg.steps; ++s) {
        CMatrix xi = CMatrix::Zero(cfg.N, cfg.N);
        for (const auto& B : basis) xi += g.next() * B;
        U = expm(scale * xi) * U;
        if (unitary) U = polar_unitary(U);
    }
    return U;
}
}  // namespace

CMatrix sample_unitary_bm(const MCConfig& cfg, long long sample_index) {
    return sample_bm(cfg, sample_index, true);
}

CMatrix sample_linear_bm(const MCConfig& cfg, long long sample_index) {
    return sample_bm(cfg, sample_index, false);
}

namespace {
struct KahanSum {
    std::complex<double> sum{0, 0}, comp{0, 0};
    void add(std::complex<double> v) {
        std::complex<double> y = v - comp;
        std::complex<double> t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};
}  // namespace

std::vector<MomentEstimate> estimate_panel(const std::vector<Element>& ps, const MCConfig& cfg,
                                           int threads) {
    if (cfg.samples < 1 || cfg.steps < 1 || cfg.N < 1)
        throw argument_error("MC config fields must be positive");
    bool unitary = cfg.group == MatrixGroup::unitary;
    size_t k = ps.size();
    threads = std::max(1, threads);
    struct Accum {
        std::vector<KahanSum> val, sq;
    };
    std::vector<Accum> parts(threads);
    auto worker = [&](int tid) {
        Accum& acc = parts[tid];
        acc.val.resize(k);
        acc.sq.resize(k);
        std::map<int, CMatrix> assign;
        for (long long i = tid; i < cfg.samples; i += threads) {
            CMatrix M = sample_bm(cfg, i, unitary);
            assign[1] = std::move(M);
            for (size_t j = 0; j < k; ++j) {
                std::complex<double> v = evaluate_scalar(ps[j], assign, cfg.t);
                acc.val[j].add(v);
                acc.sq[j].add(std::complex<double>(std::norm(v), 0.0));
            }
        }
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int tIdx = 0; tIdx < threads; ++tIdx) pool.emplace_back(worker, tIdx);
        for (auto& th : pool) th.join();
    }
    std::vector<MomentEstimate> out(k);
    for (size_t j = 0; j < k; ++j) {
        KahanSum v, s;
        for (const auto& part : parts) {
            if (part.val.empty()) continue;
            v.add(part.val[j].sum);
            s.add(part.sq[j].sum);
        }
        double n = double(cfg.samples);
        std::complex<double> mean = v.sum / n;
        double var = 0.0;
        if (cfg.samples > 1)
            var = std::max(0.0, (s.sum.real() - n * std::norm(mean)) / (n - 1.0));
        out[j] = {mean, std::sqrt(var / n), cfg.samples};
    }
    return out;
}

MomentEstimate estimate(const Element& p, const MCConfig& cfg, int threads) {
    return estimate_panel({p}, cfg, threads)[0];
}

double laplacian_fd_check(const Element& p, int N, const CMatrix& U, double h) {
    std::map<int, CMatrix> assign;
    assign[1] = U;
    Element generator = apply_op(OpId::finite_n_u, p, N);
    CMatrix exact = evaluate_element(generator, assign, 0.0);
    CMatrix fd = CMatrix::Zero(N, N);
    CMatrix center = evaluate_element(p, assign, 0.0);
    for (const auto& B : unitary_basis(N)) {
        std::map<int, CMatrix> plus{{1, expm(h * B) * U}}, minus{{1, expm(-h * B) * U}};
        fd += (evaluate_element(p, plus, 0.0) - 2.0 * center + evaluate_element(p, minus, 0.0)) /
              (h * h);
    }
    double scale = std::max(exact.cwiseAbs().maxCoeff(), 1e-30);
    return (fd - exact).cwiseAbs().maxCoeff() / scale;
}

}  // namespace freeconv

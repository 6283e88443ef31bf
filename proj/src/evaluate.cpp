#include "freeconv/evaluate.hpp"

#include "freeconv/errors.hpp"

namespace freeconv {

namespace {
CMatrix letter_matrix(const Letter& l, const std::map<int, CMatrix>& assignment) {
    auto it = assignment.find(l.index);
    if (it == assignment.end())
        throw evaluation_error("no matrix assigned to X" + std::to_string(l.index));
    const CMatrix& A = it->second;
    switch (l.deco) {
        case Deco::plain: return A;
        case Deco::star: return A.adjoint();
        case Deco::inv:
        case Deco::starinv: {
            Eigen::FullPivLU<CMatrix> lu(A);
            if (!lu.isInvertible())
                throw evaluation_error("singular matrix under an inverse decoration");
            CMatrix inv = lu.inverse();
            return l.deco == Deco::inv ? inv : CMatrix(inv.adjoint());
        }
    }
    throw evaluation_error("bad decoration");
}

CMatrix word_matrix(const Word& w, int N, const std::map<int, CMatrix>& assignment) {
    CMatrix acc = CMatrix::Identity(N, N);
    for (const auto& l : w) acc *= letter_matrix(l, assignment);
    return acc;
}
}  // namespace

CMatrix evaluate_element(const Element& p, const std::map<int, CMatrix>& assignment, double tval) {
    if (assignment.empty()) throw evaluation_error("empty matrix assignment");
    int N = int(assignment.begin()->second.rows());
    for (const auto& [i, A] : assignment)
        if (A.rows() != N || A.cols() != N)
            throw evaluation_error("assigned matrices must share one square dimension");
    CMatrix acc = CMatrix::Zero(N, N);
    for (const auto& [b, c] : p.terms()) {
        std::complex<double> coeff = c.eval(tval);
        for (const auto& t : b.traces) coeff *= word_matrix(t, N, assignment).trace() / double(N);
        acc += coeff * word_matrix(b.outer, N, assignment);
    }
    return acc;
}

std::complex<double> evaluate_scalar(const Element& p, const std::map<int, CMatrix>& assignment,
                                     double tval) {
    int N = int(assignment.begin()->second.rows());
    return evaluate_element(p, assignment, tval).trace() / double(N);
}

}  // namespace freeconv

#include "sbmdyn/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "sbmdyn/error.hpp"

namespace sbmdyn {

SvdResult svd_truncate(const Matrix& theta, int max_rank, double weight_tol) {
    if (!theta.allFinite()) throw NumericalError("svd_truncate: non-finite input");
    Matrix u, v;
    RealVector sv;
    {
        Eigen::BDCSVD<Matrix> svd(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
        u = svd.matrixU();
        v = svd.matrixV();
        sv = svd.singularValues();
    }
    // BDCSVD occasionally returns NaN vectors on rank-deficient input.
    if (!u.allFinite() || !v.allFinite() || !sv.allFinite()) {
        Eigen::JacobiSVD<Matrix> svd(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
        u = svd.matrixU();
        v = svd.matrixV();
        sv = svd.singularValues();
        if (!u.allFinite() || !v.allFinite()) throw NumericalError("svd_truncate: decomposition failed");
    }
    const double total = sv.squaredNorm();
    if (!(total > 0.0)) throw DegenerateStateError("svd_truncate: zero tensor");

    const int full = static_cast<int>(sv.size());
    int keep = std::min(full, std::max(max_rank, 1));
    // Drop the tail while its relative weight stays below weight_tol.
    double tail = 0.0;
    for (int i = full - 1; i >= keep; --i) tail += sv(i) * sv(i);
    while (keep > 1) {
        const double w = sv(keep - 1) * sv(keep - 1);
        if ((tail + w) / total >= weight_tol) break;
        tail += w;
        --keep;
    }
    SvdResult r;
    r.left = u.leftCols(keep);
    r.values = sv.head(keep);
    r.right = v.leftCols(keep).adjoint();
    r.discarded_weight = tail / total;
    return r;
}

EighResult eigh(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("eigh: decomposition failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

Matrix expm_hermitian(const Matrix& h, cplx c) {
    if (hermiticity_defect(h) > 1e-10 * std::max(1.0, h.cwiseAbs().maxCoeff()))
        throw NumericalError("expm_hermitian: matrix is not Hermitian");
    const EighResult e = eigh(0.5 * (h + h.adjoint()));
    Vector f(e.values.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = std::exp(c * e.values(i));
    return e.vectors * f.asDiagonal() * e.vectors.adjoint();
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

double hermiticity_defect(const Matrix& h) {
    if (h.rows() != h.cols()) return INFINITY;
    if (h.size() == 0) return 0.0;
    return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace sbmdyn

#pragma once

#include <Eigen/Dense>
#include <complex>

namespace sbmdyn {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

/// Thin SVD with singular values sorted descending.
struct SvdResult {
    Matrix left;        // m x r, orthonormal columns
    RealVector values;  // r
    Matrix right;       // r x n, orthonormal rows (already V^dagger)
    double discarded_weight = 0.0;
};

/// Keeps at most `max_rank` singular values and drops the smallest tail whose
/// relative weight is below `weight_tol`. Discarded weight is relative to the
/// total weight of `theta`. Throws DegenerateStateError for an all-zero input.
SvdResult svd_truncate(const Matrix& theta, int max_rank, double weight_tol);

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
struct EighResult {
    RealVector values;
    Matrix vectors;
};
EighResult eigh(const Matrix& h);

/// exp(c * H) for Hermitian H and complex scalar c, via eigendecomposition.
Matrix expm_hermitian(const Matrix& h, cplx c);

Matrix kron(const Matrix& a, const Matrix& b);

/// || h - h^dagger ||_max
double hermiticity_defect(const Matrix& h);

}  // namespace sbmdyn

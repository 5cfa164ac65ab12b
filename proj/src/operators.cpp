#include "sbmdyn/operators.hpp"

#include <cmath>

namespace sbmdyn::ops {

Matrix sigma_x() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = m(1, 0) = 1.0;
    return m;
}

Matrix sigma_y() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = -kI;
    m(1, 0) = kI;
    return m;
}

Matrix sigma_z() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

Matrix identity(int d) { return Matrix::Identity(d, d); }

Matrix annihilation(int d) {
    Matrix b = Matrix::Zero(d, d);
    for (int n = 1; n < d; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
    return b;
}

Matrix creation(int d) { return annihilation(d).adjoint(); }

Matrix number(int d) {
    Matrix n = Matrix::Zero(d, d);
    for (int k = 0; k < d; ++k) n(k, k) = k;
    return n;
}

Matrix position(int d) {
    const Matrix b = annihilation(d);
    return (b + b.adjoint()) / std::sqrt(2.0);
}

Matrix with_ancilla(const Matrix& op, int anc_dim) {
    if (anc_dim == 1) return op;
    return kron(op, identity(anc_dim));
}

}  // namespace sbmdyn::ops

#pragma once

// Contraction helpers shared by the MPS, TEBD and DMRG translation units.

#include <vector>

#include "sbmdyn/mps.hpp"

namespace sbmdyn::detail {

/// Left environment E(bra, ket) advanced over one site, optional operator
/// op(t, s) between bra index t and ket index s.
Matrix transfer_left(const Matrix& env, const Tensor3& bra, const Tensor3& ket, const Matrix* op);
/// Right environment F(ket, bra) advanced over one site.
Matrix transfer_right(const Matrix& env, const Tensor3& bra, const Tensor3& ket, const Matrix* op);

std::vector<Matrix> left_environments(const MpsState& s);
std::vector<Matrix> right_environments(const MpsState& s);

/// Two-site tensor with combined physical index s1*p2 + s2.
Tensor3 merge_two_sites(const Tensor3& a, const Tensor3& b);
/// Inverse reshape: rows l + dl*s1, columns s2 + p2*r.
Matrix split_matrix(const Tensor3& th, int p1, int p2);

/// rho(n, n') = sum A(l,n,r) conj(A(l',n',r')) left(l',l) right(r,r').
Matrix density_from_tensor(const Tensor3& a, const Matrix& left, const Matrix& right);

}  // namespace sbmdyn::detail

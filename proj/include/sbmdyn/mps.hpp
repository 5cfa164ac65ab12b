#pragma once

#include <vector>

#include "sbmdyn/linalg.hpp"
#include "sbmdyn/model.hpp"

namespace sbmdyn {

/// Rank-3 site tensor A[l, s, r] stored column-major as a (dl*dp) x dr matrix,
/// i.e. element (l, s, r) sits at row l + dl*s, column r. The same buffer read
/// as dl x (dp*dr) is the right-grouped matrix, and slice(s) is A[s].
struct Tensor3 {
    int dl = 1, dp = 1, dr = 1;
    Matrix m;

    Tensor3() : m(Matrix::Zero(1, 1)) {}
    Tensor3(int left, int phys, int right)
        : dl(left), dp(phys), dr(right), m(Matrix::Zero(left * phys, right)) {}

    cplx& operator()(int l, int s, int r) { return m(l + dl * s, r); }
    cplx operator()(int l, int s, int r) const { return m(l + dl * s, r); }

    auto slice(int s) { return m.middleRows(static_cast<Eigen::Index>(s) * dl, dl); }
    auto slice(int s) const { return m.middleRows(static_cast<Eigen::Index>(s) * dl, dl); }

    Eigen::Map<Matrix> right_grouped() { return {m.data(), dl, static_cast<Eigen::Index>(dp) * dr}; }
    Eigen::Map<const Matrix> right_grouped() const {
        return {m.data(), dl, static_cast<Eigen::Index>(dp) * dr};
    }

    /// A'[t] = sum_s op(t, s) A[s]; op may change the physical dimension.
    Tensor3 contract_physical(const Matrix& op) const;

    static Tensor3 from_left_grouped(Matrix mat, int dl, int dp);
    static Tensor3 from_right_grouped(const Matrix& mat, int dp, int dr);
};

enum class Spin { up, down };

/// Matrix product state with a per-site optimized boson basis (OBB).
///
/// Site k stores tensors[k] in its optimized basis of dimension
/// obb[k].rows(); the physical tensor is A^k[n] = sum_m tensors[k][m] obb[k](m, n).
/// Rows of obb[k] are orthonormal. A site's full local dimension is
/// phys_dim * anc_dim (anc_dim > 1 for purified sites, physical index major).
struct MpsState {
    std::vector<Tensor3> tensors;
    std::vector<Matrix> obb;
    std::vector<int> phys_dim;
    std::vector<int> anc_dim;
    std::vector<char> fixed_basis;  // spin site: obb stays the identity
    std::vector<double> shifts;     // frame displacement <x_k>; 0 when unshifted
    int center = 0;
    double trunc_weight = 0.0;

    int size() const { return static_cast<int>(tensors.size()); }
    int full_dim(int k) const { return phys_dim[k] * anc_dim[k]; }
    int opt_dim(int k) const { return static_cast<int>(obb[k].rows()); }
    int bond_dim(int bond) const { return tensors[bond].dr; }
    int max_bond_dim() const;
    bool shifted() const;

    Tensor3 physical_tensor(int k) const;
    /// Stores a full-basis tensor and resets the site's basis to the identity.
    void set_physical_tensor(int k, Tensor3 t);
    /// Expresses a full-basis operator in the site's optimized basis.
    Matrix to_opt_basis(const Matrix& op, int k) const;

    /// op acts in the full (unshifted representation) basis of site k.
    void apply_local(const Matrix& op, int k);
    void scale(cplx factor);
    double norm_squared() const;
};

/// Product state: spin on site 0 and the Fock vacuum on the L-1 boson sites,
/// bond dimension 1 and identity-embedding OBB transforms.
MpsState init_product_state(const ModelParams& p, Spin spin);

/// Arbitrary product state from per-site normalized vectors (full basis).
/// Site 0 is treated as a spin (fixed basis) when `spin_first` is set.
MpsState product_state(const std::vector<Vector>& locals, bool spin_first, int opt_dim = -1);

/// Prepends a spin site in the given state (bond dimension 1).
MpsState attach_spin(const MpsState& bath, Spin spin);

/// Full QR sweeps from both ends; tensors left of `new_center` become left
/// isometries, right of it right isometries.
void canonicalize(MpsState& state, int new_center);

/// Moves the orthogonality center assuming the state is already mixed
/// canonical around state.center.
void move_center(MpsState& state, int target);

struct ObbUpdate {
    double kept_weight = 1.0;       // sum of retained density-matrix eigenvalues / trace
    double discarded_weight = 0.0;  // 1 - kept_weight
};

/// Top-d_opt eigenvectors of a single-site reduced density matrix, as rows
/// of the transform V (V(m, n) = <n|m~>), plus the kept weight.
struct OptimalBasis {
    Matrix transform;
    RealVector eigenvalues;  // all eigenvalues of rho / Tr rho, descending
    double kept_weight = 1.0;
};
OptimalBasis optimal_basis(const Matrix& rho, int d_opt);

/// Reduced density matrix rho(n, n') = sum A[n] A[n']^* of the center site
/// in its full basis (normalized to unit trace).
Matrix site_density_matrix(const MpsState& state, int k);

/// Replaces V^k with the top-d_opt eigenvectors of the center site's reduced
/// density matrix and re-expresses the site tensor in the new basis.
ObbUpdate obb_update(MpsState& state, int k, int d_opt);

/// <psi|op|psi>/<psi|psi>; op is given in the unshifted physical Fock basis of
/// site k (physical leg only for purified sites). On a shifted site the
/// operator is carried into the frame with truncated shift matrices.
cplx expect_local(const MpsState& state, const Matrix& op, int k);

/// Same but op is already expressed in the representation basis.
cplx expect_local_rep(const MpsState& state, const Matrix& op, int k);

/// Physical <n_k> and <x_k> reconstructed exactly from the shifted operators.
double expect_number(const MpsState& state, int k);
double expect_position(const MpsState& state, int k);

/// <psi|O_left (x) O_right|psi>/<psi|psi> on sites (k, k+1), full-basis
/// representation operator of dimension full_dim(k)*full_dim(k+1).
cplx expect_two_site_rep(const MpsState& state, const Matrix& op, int k);

/// C(k, k') = <b_k^dag b_k'> over the boson sites (non-fixed-basis sites),
/// physical operators reconstructed as b = b_rep + <x_k>/sqrt 2.
Matrix one_body_matrix(const MpsState& state);

/// <a|b>
cplx overlap(const MpsState& a, const MpsState& b);

}  // namespace sbmdyn

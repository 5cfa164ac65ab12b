#pragma once

#include <vector>

#include "sbmdyn/linalg.hpp"
#include "sbmdyn/model.hpp"

namespace sbmdyn {

struct ProductTerm {
    Matrix left;
    Matrix right;
};

/// Nearest-neighbour chain Hamiltonian: sum_k onsite[k] + sum_k sum_j
/// bonds[k][j].left (x) bonds[k][j].right on sites (k, k+1). Operators act on
/// the physical leg of each site.
struct ChainHamiltonian {
    std::vector<int> dims;
    std::vector<Matrix> onsite;
    std::vector<std::vector<ProductTerm>> bonds;

    int size() const { return static_cast<int>(dims.size()); }
};

/// Full spin-boson chain in the frame given by `shifts` (one entry per site,
/// shifts[0] ignored): b_k -> b_k + shifts[k]/sqrt 2 substituted everywhere.
ChainHamiltonian sbm_hamiltonian(const ChainCoefficients& c, const ModelParams& p,
                                 const std::vector<double>& shifts);

/// Spin site plus bath where the spin only enters as a classical source:
/// H_B + source * eta1 (b_1 + b_1^dag). No operator acts on the spin.
/// source = +1/2 is the bath of a frozen spin-up; source = -mu gives H_B - mu E.
ChainHamiltonian spin_frozen_hamiltonian(const ChainCoefficients& c, int fock_dim, double source,
                                         const std::vector<double>& shifts);

/// Bath sites only (L-1 sites), same operator content as above.
ChainHamiltonian bath_hamiltonian(const ChainCoefficients& c, int fock_dim, double source,
                                  const std::vector<double>& shifts);

/// Two-site terms h_{k,k+1} whose sum is H. Each on-site term is split evenly
/// over the adjacent bonds that carry interaction terms (in full when only
/// one does); sites with no interacting bond fall back to any adjacent bond.
/// Matrices act on (site k) (x) (site k+1) with site k as the major index.
std::vector<Matrix> bond_terms(const ChainHamiltonian& h);

/// Dense matrix of H on the full tensor-product space (small chains only).
Matrix dense_matrix(const ChainHamiltonian& h);

/// Embeds a two-site bond operator into the dense space.
Matrix embed_bond(const std::vector<int>& dims, const Matrix& op, int bond);
Matrix embed_site(const std::vector<int>& dims, const Matrix& op, int site);

/// Matrix product operator in finite-state form.
struct MpoSite {
    struct Entry {
        int a, b;
        Matrix op;
    };
    int wl = 1, wr = 1;
    std::vector<Entry> entries;
};
using Mpo = std::vector<MpoSite>;

/// `anc_dims` extends each operator with an identity on ancilla legs.
Mpo build_mpo(const ChainHamiltonian& h, const std::vector<int>& anc_dims = {});

}  // namespace sbmdyn

#include "sbmdyn/hamiltonian.hpp"

#include <cmath>

#include "sbmdyn/error.hpp"
#include "sbmdyn/operators.hpp"
#include "sbmdyn/shift.hpp"

namespace sbmdyn {

namespace {

double shift_at(const std::vector<double>& shifts, std::size_t k) {
    return k < shifts.size() ? shifts[k] : 0.0;
}

// Appends the bath chain starting at site `first` of h.
void add_bath(ChainHamiltonian& h, const ChainCoefficients& c, int d, int first,
              const std::vector<double>& shifts) {
    const int nb = c.boson_sites();
    std::vector<ShiftedOperators> so;
    for (int k = 0; k < nb; ++k) so.push_back(shifted_local_operators(shift_at(shifts, first + k), d));
    for (int k = 0; k < nb; ++k) {
        h.dims.push_back(d);
        h.onsite.push_back(c.omega[k] * so[k].n);
    }
    for (int k = 0; k + 1 < nb; ++k) {
        auto& bond = h.bonds[first + k];
        bond.push_back({c.hop[k] * so[k].bdag, so[k + 1].b});
        bond.push_back({c.hop[k] * so[k].b, so[k + 1].bdag});
    }
}

}  // namespace

ChainHamiltonian sbm_hamiltonian(const ChainCoefficients& c, const ModelParams& p,
                                 const std::vector<double>& shifts) {
    ChainHamiltonian h;
    const int n = c.boson_sites() + 1;
    h.bonds.resize(n - 1);
    h.dims.push_back(2);
    h.onsite.push_back(-0.5 * p.delta * ops::sigma_x() - 0.5 * p.bias * ops::sigma_z());
    add_bath(h, c, p.fock_dim, 1, shifts);
    const auto so = shifted_local_operators(shift_at(shifts, 1), p.fock_dim);
    h.bonds[0].push_back({0.5 * c.eta1 * ops::sigma_z(), so.b + so.bdag});
    return h;
}

ChainHamiltonian spin_frozen_hamiltonian(const ChainCoefficients& c, int fock_dim, double source,
                                         const std::vector<double>& shifts) {
    ChainHamiltonian h;
    const int n = c.boson_sites() + 1;
    h.bonds.resize(n - 1);
    h.dims.push_back(2);
    h.onsite.push_back(Matrix::Zero(2, 2));
    add_bath(h, c, fock_dim, 1, shifts);
    const auto so = shifted_local_operators(shift_at(shifts, 1), fock_dim);
    h.onsite[1] += source * c.eta1 * (so.b + so.bdag);
    return h;
}

ChainHamiltonian bath_hamiltonian(const ChainCoefficients& c, int fock_dim, double source,
                                  const std::vector<double>& shifts) {
    ChainHamiltonian h;
    const int n = c.boson_sites();
    h.bonds.resize(std::max(n - 1, 0));
    add_bath(h, c, fock_dim, 0, shifts);
    const auto so = shifted_local_operators(shift_at(shifts, 0), fock_dim);
    h.onsite[0] += source * c.eta1 * (so.b + so.bdag);
    return h;
}

std::vector<Matrix> bond_terms(const ChainHamiltonian& h) {
    const int n = h.size();
    if (n < 2) throw ParameterError("bond_terms: chain needs at least two sites");
    std::vector<Matrix> terms(n - 1);
    for (int k = 0; k + 1 < n; ++k) {
        terms[k] = Matrix::Zero(h.dims[k] * h.dims[k + 1], h.dims[k] * h.dims[k + 1]);
        for (const auto& t : h.bonds[k]) terms[k] += kron(t.left, t.right);
    }
    for (int k = 0; k < n; ++k) {
        std::vector<int> adj;
        if (k > 0 && !h.bonds[k - 1].empty()) adj.push_back(k - 1);
        if (k + 1 < n && !h.bonds[k].empty()) adj.push_back(k);
        if (adj.empty()) adj.push_back(k > 0 ? k - 1 : k);
        const double w = 1.0 / static_cast<double>(adj.size());
        for (int b : adj) {
            if (b == k)
                terms[b] += w * kron(h.onsite[k], Matrix::Identity(h.dims[k + 1], h.dims[k + 1]));
            else
                terms[b] += w * kron(Matrix::Identity(h.dims[k - 1], h.dims[k - 1]), h.onsite[k]);
        }
    }
    return terms;
}

Matrix embed_site(const std::vector<int>& dims, const Matrix& op, int site) {
    long left = 1, right = 1;
    for (int k = 0; k < site; ++k) left *= dims[k];
    for (std::size_t k = site + 1; k < dims.size(); ++k) right *= dims[k];
    return kron(kron(Matrix::Identity(left, left), op), Matrix::Identity(right, right));
}

Matrix embed_bond(const std::vector<int>& dims, const Matrix& op, int bond) {
    long left = 1, right = 1;
    for (int k = 0; k < bond; ++k) left *= dims[k];
    for (std::size_t k = bond + 2; k < dims.size(); ++k) right *= dims[k];
    return kron(kron(Matrix::Identity(left, left), op), Matrix::Identity(right, right));
}

Matrix dense_matrix(const ChainHamiltonian& h) {
    long total = 1;
    for (int d : h.dims) total *= d;
    Matrix m = Matrix::Zero(total, total);
    for (int k = 0; k < h.size(); ++k) m += embed_site(h.dims, h.onsite[k], k);
    for (int k = 0; k + 1 < h.size(); ++k)
        for (const auto& t : h.bonds[k]) m += embed_bond(h.dims, kron(t.left, t.right), k);
    return m;
}

Mpo build_mpo(const ChainHamiltonian& h, const std::vector<int>& anc_dims) {
    const int n = h.size();
    auto anc = [&](int k) { return anc_dims.empty() ? 1 : anc_dims[k]; };
    auto ext = [&](const Matrix& op, int k) { return ops::with_ancilla(op, anc(k)); };
    Mpo mpo(n);
    for (int k = 0; k < n; ++k) {
        const int rin = k > 0 ? static_cast<int>(h.bonds[k - 1].size()) : 0;
        const int rout = k + 1 < n ? static_cast<int>(h.bonds[k].size()) : 0;
        // Full index spaces: 0 = start, 1..r = pending, r+1 = done.
        const int wl_full = rin + 2, wr_full = rout + 2;
        const int dim = h.dims[k] * anc(k);
        const Matrix id = Matrix::Identity(dim, dim);
        std::vector<MpoSite::Entry> full;
        if (k + 1 < n) full.push_back({0, 0, id});
        for (int j = 0; j < rout; ++j) full.push_back({0, 1 + j, ext(h.bonds[k][j].left, k)});
        full.push_back({0, wr_full - 1, ext(h.onsite[k], k)});
        for (int i = 0; i < rin; ++i) full.push_back({1 + i, wr_full - 1, ext(h.bonds[k - 1][i].right, k)});
        if (k > 0) full.push_back({wl_full - 1, wr_full - 1, id});

        MpoSite& w = mpo[k];
        w.wl = k == 0 ? 1 : wl_full;
        w.wr = k == n - 1 ? 1 : wr_full;
        for (auto& e : full) {
            if (k == 0 && e.a != 0) continue;
            if (k == n - 1 && e.b != wr_full - 1) continue;
            const int b = (k == n - 1) ? 0 : e.b;
            w.entries.push_back({e.a, b, std::move(e.op)});
        }
    }
    return mpo;
}

}  // namespace sbmdyn

#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace sbmdyn {

/// Physical couplings, truncations and schedule for one spin-boson run.
/// Energies are in units of omega_c unless noted.
struct ModelParams {
    double delta = 0.1;     // tunneling
    double bias = 0.0;      // energy bias of the two-level system
    double alpha = 0.0;     // dimensionless coupling
    double s = 1.0;         // spectral exponent
    double omega_c = 1.0;   // cutoff frequency
    int chain_length = 30;  // L: spin site plus L-1 boson sites
    int fock_dim = 6;       // d
    int obb_dim = 6;        // d_opt
    int bond_cap = 64;      // D_c
    double dt = 0.1;
    double beta = std::numeric_limits<double>::infinity();
    double mu = 0.5;

    /// Throws ParameterError when an invariant is violated. `purified`
    /// allows obb_dim up to fock_dim^2.
    void validate(bool purified = false) const;
};

struct ChainCoefficients {
    double eta1 = 0.0;
    std::vector<double> omega;  // on-site energies, k = 1..L-1
    std::vector<double> hop;    // hoppings, k = 1..L-2

    int boson_sites() const { return static_cast<int>(omega.size()); }
    /// Symmetric tridiagonal single-particle matrix of the bath chain.
    Eigen::MatrixXd tridiagonal() const;
};

struct StarBath {
    Eigen::VectorXd frequencies;  // ascending
    Eigen::MatrixXd transform;    // b_p = sum_k O(p,k) b_k
};

/// J(omega) = 2 pi alpha omega_c^{1-s} omega^s for omega < omega_c, else 0.
double spectral_density(double omega, const ModelParams& p);

ChainCoefficients chain_coefficients(const ModelParams& p);

/// Closed-form on-site energy / hopping of chain site k (k >= 1).
double chain_omega(double s, double omega_c, int k);
double chain_hop(double s, double omega_c, int k);

/// Diagonalizes the chain's tridiagonal matrix back into star modes.
StarBath chain_to_star(const ChainCoefficients& c);

}  // namespace sbmdyn

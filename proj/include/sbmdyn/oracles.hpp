#pragma once

#include <vector>

#include "sbmdyn/model.hpp"
#include "sbmdyn/tebd.hpp"

namespace sbmdyn {

/// Largest Hilbert-space dimension the dense references accept.
inline constexpr long kDenseDimCap = 4096;

struct DenseTrajectory {
    std::vector<double> times;
    std::vector<double> sigma_z;
    std::vector<std::vector<double>> occupations;  // [time][boson site]
    std::vector<double> energy;
};

/// Exact evolution of spin |up> (x) a bath product state (vacuum unless
/// `bath_coherent` gives per-site displacements <x_k>) under the truncated
/// chain Hamiltonian, by eigendecomposition of the dense matrix.
DenseTrajectory dense_evolve(const ModelParams& p, double t_final, double dt_obs,
                             const std::vector<double>& bath_coherent = {});

struct DenseThermal {
    std::vector<double> occupations;  // <n_k>, boson sites
    std::vector<double> positions;    // <x_k>
    double partition = 0.0;           // Z = Tr exp(-beta [H_B - mu E])
};

/// exp(-beta [H_B - mu eta1 (b_1 + b_1^dag)]) / Z on the L-1 truncated bath sites.
DenseThermal dense_thermal(const ModelParams& p, double beta, double mu);

/// Minimizer of E(x) = 1/2 sum w_k x_k^2 + sum t_k x_k x_{k+1} + sqrt2 source eta1 x_1,
/// i.e. T x = -sqrt2 source eta1 e_1. The frozen spin-up bath has source 1/2.
std::vector<double> displacement_oracle(const ChainCoefficients& c, double source = 0.5);

/// Dense Hamiltonian assembled directly from Kronecker products.
Matrix dense_sbm_hamiltonian(const ModelParams& p);

}  // namespace sbmdyn

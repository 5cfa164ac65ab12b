#pragma once

#include <cstdint>
#include <vector>

#include "sbmdyn/hamiltonian.hpp"
#include "sbmdyn/mps.hpp"
#include "sbmdyn/shift.hpp"
#include "sbmdyn/tebd.hpp"

namespace sbmdyn {

struct DmrgOptions {
    int max_sweeps = 200;
    double e_tol = 1e-10;
    double noise = 1e-8;       // subspace-expansion amplitude
    int noise_sweeps = 4;      // sweeps (pairs of half sweeps) with expansion
    int bond_cap = 64;
    int initial_bond = 8;
    double weight_tol = 1e-12;
    std::uint64_t seed = 12345;
};

struct DmrgResult {
    MpsState state;              // full local basis, center at site 0
    double energy = 0.0;
    std::vector<double> sweep_energies;
    int sweeps = 0;
    bool converged = false;
};

/// Single-site variational ground state of `h` with noisy subspace expansion.
/// `initial` (same local dimensions) is used as the starting point when given;
/// otherwise a seeded random MPS.
DmrgResult ground_state(const ChainHamiltonian& h, const DmrgOptions& opt, const MpsState* initial = nullptr);

struct PolarizedBathOptions {
    bool shifted = true;
    double shift_tol = 1e-6;
    double damping = 0.7;  // new = (1 - damping) old + damping * measured
    int max_shift_iterations = 100;
    DmrgOptions dmrg;
};

struct PolarizedBath {
    MpsState state;         // L-1 boson sites, OBB-compressed to obb_dim
    ShiftRegister shifts;   // per bath site
    double energy = 0.0;
    int iterations = 0;
    double residual = 0.0;  // max |measured <x_k>| in the final frame
    bool converged = false;
};

/// Bath ground state for a spin frozen in |up>, i.e. H_B + eta1/2 (b_1 + b_1^dag),
/// with the self-consistent shift iteration when `shifted` is set.
PolarizedBath polarized_bath_state(const ModelParams& p, const PolarizedBathOptions& opt = {});

struct DynamicsOptions {
    PolarizedBathOptions bath;
    double epsilon = 0.1;
    ShiftMode mode = ShiftMode::substitute;
    int order = 2;
};

struct DynamicsInitial {
    MpsState state;             // spin |up> attached, frame shifts applied
    ShiftRegister shifts;       // per MPS site (0 on the spin)
    GateSet gates;
    ChainHamiltonian hamiltonian;  // H' in the state's frame
    EpsilonShiftReport epsilon_report;
    PolarizedBath bath;
};

DynamicsInitial prepare_dynamics_initial(const ModelParams& p, const DynamicsOptions& opt = {});

/// Rebuilds gates for the state's frame (used after resuming from a checkpoint).
GateSet dynamics_gates(const ModelParams& p, const std::vector<double>& shifts, ShiftMode mode, int order);

}  // namespace sbmdyn

#pragma once

#include <functional>
#include <string>

#include "sbmdyn/mps.hpp"
#include "sbmdyn/tebd.hpp"

namespace sbmdyn {

/// Purified thermal setup: every boson site carries a physical and an
/// ancilla leg of dimension d each (local index n_phys * d + n_anc).
struct ThermalParams {
    double beta = 2.0;
    double mu = 0.5;
    int d2 = 0;  // d*d, filled by thermal_params()
};
ThermalParams thermal_params(const ModelParams& p);

using WarningSink = std::function<void(const std::string&)>;

struct ThermalOptions {
    double dtau = 0.0;  // <= 0 selects dt/5
    int order = 2;
    /// Prepare in the frame displaced by the frozen-source solution, so that
    /// H - mu E becomes the unshifted bath Hamiltonian plus a constant.
    bool shifted = false;
    bool check_dtau = false;  // repeat with dtau/2 and warn on disagreement
    int max_fock_dim = 6;
    WarningSink warn;
};

/// Spin |up> on site 0 and a maximally entangled physical-ancilla pair on
/// each boson site. Norm 1, bond dimension 1.
MpsState infinite_T_state(const ModelParams& p);

/// Purification of exp(-beta [H_B - mu E]) / Z_B, E = eta1 (b_1 + b_1^dag),
/// obtained by imaginary-time evolution of infinite_T_state over beta/2.
MpsState thermal_state(const ModelParams& p, double beta, double mu, const ThermalOptions& opt = {});

struct ThermalEvolveOptions {
    int observe_every = 1;
    int snapshot_every = 10;
    int order = 2;
    double trunc_budget = 1e-3;
    int max_fock_dim = 6;
    WarningSink warn;
    std::function<void(int step, double t, double step_err)> on_step;
};

/// Real-time evolution of a purified state; gates act on the physical legs
/// and use the state's frame (unshifted for the default thermal_state).
TrajectoryRecord thermal_evolve(MpsState& state, const ModelParams& p, double t_final,
                                const ThermalEvolveOptions& opt = {});

}  // namespace sbmdyn

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sbmdyn/error.hpp"
#include "sbmdyn/hamiltonian.hpp"
#include "sbmdyn/mps.hpp"
#include "sbmdyn/shift.hpp"

namespace sbmdyn {

enum class TimeKind { real, imaginary };

/// Two-site evolution operators grouped by bond parity. Bond b couples sites
/// (b, b+1); even_gates[b] is set for even b, odd_gates[b] for odd b, empty
/// otherwise. For order 2 the odd gates are half steps (odd, even, odd).
struct GateSet {
    double dt = 0.1;
    TimeKind kind = TimeKind::real;
    int order = 2;
    ShiftMode shift_mode = ShiftMode::substitute;
    std::vector<Matrix> even_gates;
    std::vector<Matrix> odd_gates;

    int bonds() const { return static_cast<int>(even_gates.size()); }
};

struct Snapshot {
    double t = 0.0;
    RealVector occupations;  // <n_k> on boson sites
    Matrix one_body;         // C(k, k')
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<double> sigma_z;
    std::vector<double> norm;
    std::vector<double> energy;
    std::vector<double> trunc_err;  // discarded weight since the previous row
    std::vector<Snapshot> snapshots;

    std::size_t size() const { return times.size(); }
};

/// Chain Hamiltonian of a run: sbm_hamiltonian(...) split into bond terms.
std::vector<Matrix> local_terms(const ChainCoefficients& c, const ModelParams& p,
                                const std::vector<double>& shifts = {});

struct GateOptions {
    TimeKind kind = TimeKind::real;
    int order = 2;
    ShiftMode mode = ShiftMode::substitute;
    /// Needed for sandwich mode: per-site displacement and physical dimension.
    std::vector<double> shifts;
    std::vector<int> phys_dims;
    /// Identity legs appended to each site (purification); empty means none.
    std::vector<int> anc_dims;
};

/// exp(-i h dt) (real) or exp(-h dt) (imaginary) per bond. In substitute
/// mode `terms` must already be expressed in the shifted frame; in sandwich
/// mode they are unshifted and wrapped with truncated shift matrices.
GateSet build_gates(const std::vector<Matrix>& terms, double dt, const GateOptions& opt);

struct StepOptions {
    int bond_cap = 64;
    int obb_dim = -1;  // <= 0: keep the full local dimension
    double weight_tol = 1e-12;
    bool obb_every_gate = true;
};

/// Applies one gate to bond b and restores canonical form with the center
/// on the side given by `move_right`. Returns discarded weight (SVD + OBB).
double apply_bond_gate(MpsState& state, int bond, const Matrix& gate, const StepOptions& opt,
                       bool move_right, bool renormalize);

/// One Trotter step: odd then even layer (order 1) or odd/2, even, odd/2
/// (order 2). Imaginary-time steps renormalize the state.
double tebd_step(MpsState& state, const GateSet& gates, const StepOptions& opt);

/// Partial record emitted when the truncation budget is exhausted.
struct EvolutionAborted : TruncationBudgetExceeded {
    EvolutionAborted(const std::string& what, TrajectoryRecord rec)
        : TruncationBudgetExceeded(what), partial(std::move(rec)) {}
    TrajectoryRecord partial;
};

struct EvolveOptions {
    double t_start = 0.0;
    double t_final = 0.0;
    int observe_every = 1;
    int snapshot_every = 0;  // 0 disables snapshots
    StepOptions step;
    double trunc_budget = 1e-3;
    bool record_initial = true;
    int checkpoint_every = 0;
    std::function<void(const MpsState&, double t, const TrajectoryRecord&)> on_checkpoint;
    std::function<void(int step, double t, double step_err)> on_step;
};

/// Observes <sigma_z> on site 0 (when it is a spin), the norm, <H> from
/// `energy_mpo` (skipped when null) and the discarded weight.
void observe(const MpsState& state, const Mpo* energy_mpo, double t, double err,
             TrajectoryRecord& rec);
Snapshot take_snapshot(const MpsState& state, double t);

TrajectoryRecord evolve(MpsState& state, const GateSet& gates, const Mpo* energy_mpo,
                        const EvolveOptions& opt);

/// Convenience: real-time evolution of `state` under the full spin-boson
/// Hamiltonian in the state's own frame (substitute gates, order 2).
TrajectoryRecord evolve(MpsState& state, const ModelParams& p, double t_final, int observe_every);

/// <psi|H|psi>/<psi|psi> for an MPO acting in the full local basis.
double mpo_expectation(const MpsState& state, const Mpo& mpo);

/// `t,sigma_z,norm,energy,trunc_err`, 15 significant digits.
void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec);
TrajectoryRecord read_trajectory_csv(const std::string& path);

}  // namespace sbmdyn

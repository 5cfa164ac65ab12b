#include "sbmdyn/thermal.hpp"

#include <cmath>
#include <sstream>

#include "sbmdyn/error.hpp"
#include "sbmdyn/hamiltonian.hpp"
#include "sbmdyn/oracles.hpp"

namespace sbmdyn {

namespace {

void check_fock_dim(const ModelParams& p, int max_d, const WarningSink& warn) {
    if (p.fock_dim > max_d) {
        std::ostringstream msg;
        msg << "purified runs need fock_dim <= " << max_d << " (got " << p.fock_dim << ")";
        throw ParameterError(msg.str());
    }
    if (warn) {
        const long g = static_cast<long>(p.fock_dim) * p.fock_dim * p.fock_dim * p.fock_dim;
        std::ostringstream msg;
        msg << "purified two-site gates have dimension " << g << "x" << g;
        warn(msg.str());
    }
}

std::vector<int> site_dims(const MpsState& s, bool ancilla) {
    std::vector<int> out;
    for (int k = 0; k < s.size(); ++k) out.push_back(ancilla ? s.anc_dim[k] : s.phys_dim[k]);
    return out;
}

StepOptions purified_step(const ModelParams& p) {
    StepOptions so;
    so.bond_cap = p.bond_cap;
    so.obb_dim = p.obb_dim;
    return so;
}

MpsState imaginary_evolve(MpsState s, const ModelParams& p, double mu, double half_beta, double dtau,
                          int order) {
    const ChainCoefficients c = chain_coefficients(p);
    const ChainHamiltonian h = spin_frozen_hamiltonian(c, p.fock_dim, -mu, s.shifts);
    const long steps = std::max(1L, std::lround(half_beta / dtau));
    GateOptions go;
    go.kind = TimeKind::imaginary;
    go.order = order;
    go.phys_dims = site_dims(s, false);
    go.anc_dims = site_dims(s, true);
    const GateSet gates = build_gates(bond_terms(h), half_beta / static_cast<double>(steps), go);
    const StepOptions so = purified_step(p);
    for (long i = 0; i < steps; ++i) tebd_step(s, gates, so);
    s.scale(1.0 / std::sqrt(s.norm_squared()));
    return s;
}

}  // namespace

ThermalParams thermal_params(const ModelParams& p) {
    return {p.beta, p.mu, p.fock_dim * p.fock_dim};
}

MpsState infinite_T_state(const ModelParams& p) {
    const int d = p.fock_dim;
    MpsState s;
    Tensor3 spin(1, 2, 1);
    spin(0, 0, 0) = 1.0;
    s.tensors.push_back(spin);
    s.obb.push_back(Matrix::Identity(2, 2));
    s.phys_dim.push_back(2);
    s.anc_dim.push_back(1);
    s.fixed_basis.push_back(1);
    s.shifts.push_back(0.0);
    for (int k = 1; k < p.chain_length; ++k) {
        Tensor3 t(1, d * d, 1);
        for (int n = 0; n < d; ++n) t(0, n * d + n, 0) = 1.0 / std::sqrt(static_cast<double>(d));
        s.tensors.push_back(t);
        s.obb.push_back(Matrix::Identity(d * d, d * d));
        s.phys_dim.push_back(d);
        s.anc_dim.push_back(d);
        s.fixed_basis.push_back(0);
        s.shifts.push_back(0.0);
    }
    s.center = 0;
    return s;
}

MpsState thermal_state(const ModelParams& p, double beta, double mu, const ThermalOptions& opt) {
    p.validate(true);
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ParameterError("thermal_state: beta must be finite and positive");
    check_fock_dim(p, opt.max_fock_dim, nullptr);
    const double dtau = opt.dtau > 0.0 ? opt.dtau : p.dt / 5.0;
    MpsState s = infinite_T_state(p);
    if (opt.shifted && mu != 0.0) {
        // Frozen-source displacement for source -mu: T x = +mu sqrt2 eta1 e_1.
        const std::vector<double> x = displacement_oracle(chain_coefficients(p), -mu);
        for (int k = 1; k < s.size(); ++k) s.shifts[k] = x[k - 1];
    }
    MpsState out = imaginary_evolve(s, p, mu, 0.5 * beta, dtau, opt.order);
    if (opt.check_dtau) {
        const MpsState half = imaginary_evolve(s, p, mu, 0.5 * beta, 0.5 * dtau, opt.order);
        double diff = 0.0;
        for (int k = 1; k < out.size(); ++k)
            diff = std::max(diff, std::abs(expect_number(out, k) - expect_number(half, k)));
        if (diff > 1e-4 && opt.warn) {
            std::ostringstream msg;
            msg << "thermal_state: occupations change by " << diff << " when dtau is halved";
            opt.warn(msg.str());
        }
    }
    return out;
}

TrajectoryRecord thermal_evolve(MpsState& state, const ModelParams& p, double t_final,
                                const ThermalEvolveOptions& opt) {
    p.validate(true);
    check_fock_dim(p, opt.max_fock_dim, opt.warn);
    const ChainCoefficients c = chain_coefficients(p);
    const ChainHamiltonian h = sbm_hamiltonian(c, p, state.shifts);
    GateOptions go;
    go.kind = TimeKind::real;
    go.order = opt.order;
    go.phys_dims = site_dims(state, false);
    go.anc_dims = site_dims(state, true);
    const GateSet gates = build_gates(bond_terms(h), p.dt, go);
    const Mpo mpo = build_mpo(h, go.anc_dims);
    EvolveOptions eo;
    eo.t_final = t_final;
    eo.observe_every = opt.observe_every;
    eo.snapshot_every = opt.snapshot_every;
    eo.step = purified_step(p);
    eo.trunc_budget = opt.trunc_budget;
    eo.on_step = opt.on_step;
    return evolve(state, gates, &mpo, eo);
}

}  // namespace sbmdyn
